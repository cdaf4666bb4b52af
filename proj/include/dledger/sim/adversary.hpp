#pragma once

#include "dledger/protocol/peer_daemon.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace dledger::sim {

/// Prefix of application payloads that honest validators refuse.
inline constexpr std::string_view kInvalidMarker = "INVALID";

bool has_valid_payload(const Record& record);

/// Calls `action` at Poisson arrival times of rate `rate` until `until`.
void schedule_poisson(net::Scheduler& sched, std::mt19937_64& rng, double rate, double until,
                      std::function<void()> action);

/// Publishes records with a valid PoA that approve its own earlier spam and
/// already confirmed records.
void run_spammer(protocol::PeerDaemon& peer, double rate, double until);

/// Publishes records that approve only already confirmed records.
void run_lazy(protocol::PeerDaemon& peer, double rate, double until);

/// Multicasts notifications with forged generators, hashes or PoAs.
void run_notif_forger(protocol::PeerDaemon& peer, double rate, double until, int hops);

/// The beneficiary publishes an application-invalid record at `at`; each
/// colluder then publishes one record approving it.
/// `invalid` receives the record's name.
void run_colluders(protocol::PeerDaemon& beneficiary, std::vector<protocol::PeerDaemon*> colluders,
                   double at, std::shared_ptr<std::optional<RecordName>> invalid);

} // namespace dledger::sim
