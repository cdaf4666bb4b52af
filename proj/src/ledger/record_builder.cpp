#include "dledger/ledger/record_builder.hpp"

#include <algorithm>

namespace dledger {

std::vector<RecordName> choose_approvals(const LedgerState& ledger, const EntityId& self,
                                         std::size_t n, std::mt19937_64& rng)
{
  std::vector<RecordName> chosen;
  auto pool = ledger.foreign_tailing(self);
  // Partial Fisher-Yates: each step draws uniformly from the untouched suffix.
  for (std::size_t i = 0; i < pool.size() && chosen.size() < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
    if (ledger.approvable(pool[i]))
      chosen.push_back(pool[i]);
  }
  if (chosen.size() < n) {
    for (auto& name : ledger.fallback_candidates(self)) {
      if (chosen.size() == n)
        break;
      if (ledger.approvable(name))
        chosen.push_back(std::move(name));
    }
  }
  if (chosen.size() < n)
    throw InsufficientCandidates("only " + std::to_string(chosen.size()) + " of " +
                                 std::to_string(n) + " approval candidates available for " +
                                 self.str());
  return chosen;
}

Record create_record(const LedgerState& ledger, const SigningIdentity& id, RecordPayload payload,
                     std::mt19937_64& rng)
{
  auto approved = choose_approvals(ledger, id.entity, ledger.config().approvals_per_record, rng);
  RecordContent content{id.entity, std::move(approved), std::move(payload), id.signer_key};
  return seal_record(std::move(content), ledger.scheme(), id.private_key,
                     ledger.config().max_payload);
}

Record create_record_approving(const SigningIdentity& id, std::vector<RecordName> approved,
                               RecordPayload payload, const SignatureScheme& scheme)
{
  RecordContent content{id.entity, std::move(approved), std::move(payload), id.signer_key};
  return seal_record(std::move(content), scheme, id.private_key);
}

} // namespace dledger
