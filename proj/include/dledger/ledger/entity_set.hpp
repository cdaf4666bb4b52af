#pragma once

#include <cstdint>
#include <vector>

namespace dledger {

/// Set of dense entity indices. The first 64 indices live inline, which covers
/// every simulated network in the bundled scenarios without a heap allocation.
class EntitySet
{
public:
  bool test(std::uint32_t index) const
  {
    if (index < 64)
      return (low_ >> index) & 1u;
    auto word = index / 64 - 1;
    return word < high_.size() && ((high_[word] >> (index % 64)) & 1u);
  }

  /// Returns true when `index` was not yet present.
  bool insert(std::uint32_t index);

  void merge(const EntitySet& other);

  std::uint32_t count() const;

  void clear()
  {
    low_ = 0;
    high_.clear();
  }

  bool operator==(const EntitySet&) const = default;

private:
  std::uint64_t low_ = 0;
  std::vector<std::uint64_t> high_;
};

} // namespace dledger
