#pragma once

#include "dledger/ledger/ledger_state.hpp"

#include <random>
#include <stdexcept>

namespace dledger {

/// What a peer needs to sign records in its own name.
struct SigningIdentity
{
  EntityId entity;
  KeyLocator signer_key;
  Bytes private_key;
};

class InsufficientCandidates : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Picks `n` distinct records for `self` to approve: uniformly without
/// replacement from foreign tailing records, then from recent low-weight
/// records when the tailing set runs short. Picks that fail
/// LedgerState::approvable are dropped and repicked.
std::vector<RecordName> choose_approvals(const LedgerState& ledger, const EntityId& self,
                                         std::size_t n, std::mt19937_64& rng);

/// Assembles, names and signs a record. The ledger is not modified; the
/// caller admits the result like any remote record.
Record create_record(const LedgerState& ledger, const SigningIdentity& id, RecordPayload payload,
                     std::mt19937_64& rng);

/// Seals a record with an explicit approval list, bypassing candidate selection.
Record create_record_approving(const SigningIdentity& id, std::vector<RecordName> approved,
                               RecordPayload payload, const SignatureScheme& scheme);

} // namespace dledger
