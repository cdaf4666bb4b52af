#include "dledger/ledger/entity_set.hpp"

#include <bit>

namespace dledger {

bool EntitySet::insert(std::uint32_t index)
{
  std::uint64_t* word;
  if (index < 64) {
    word = &low_;
  }
  else {
    auto w = index / 64 - 1;
    if (w >= high_.size())
      high_.resize(w + 1, 0);
    word = &high_[w];
  }
  std::uint64_t bit = std::uint64_t{1} << (index % 64);
  if (*word & bit)
    return false;
  *word |= bit;
  return true;
}

void EntitySet::merge(const EntitySet& other)
{
  low_ |= other.low_;
  if (other.high_.size() > high_.size())
    high_.resize(other.high_.size(), 0);
  for (std::size_t i = 0; i < other.high_.size(); ++i)
    high_[i] |= other.high_[i];
}

std::uint32_t EntitySet::count() const
{
  auto n = static_cast<std::uint32_t>(std::popcount(low_));
  for (auto w : high_)
    n += static_cast<std::uint32_t>(std::popcount(w));
  return n;
}

} // namespace dledger
