#pragma once

#include "dledger/identity/identity_manager.hpp"
#include "dledger/protocol/peer_daemon.hpp"
#include "dledger/sim/metrics.hpp"
#include "dledger/sim/scenario.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <unordered_map>

namespace dledger::sim {

enum class Role
{
  Honest,
  Adversary,
  Observer, // passive, ignores every policy
};

enum class OutputFormat
{
  Csv,
  Dot,
  Dump,
};

/// One scenario run: builds identities, network and peers, drives the
/// workload and adversaries, and collects metrics.
class Simulation
{
public:
  explicit Simulation(Scenario scenario);
  ~Simulation();

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Runs to the scenario duration and finalizes the metrics.
  void run();

  const Scenario& scenario() const { return scenario_; }
  const MetricsLog& metrics() const { return metrics_; }
  net::Network& network() { return *net_; }
  net::Scheduler& scheduler() { return sched_; }

  std::size_t peer_count() const { return peers_.size(); }
  protocol::PeerDaemon& peer(std::size_t i) { return *peers_.at(i); }
  const protocol::PeerDaemon& peer(std::size_t i) const { return *peers_.at(i); }
  Role role(std::size_t i) const { return roles_.at(i); }
  const std::vector<std::size_t>& honest() const { return honest_; }

  // --- outcome predicates (valid after run) ---------------------------------
  /// Mean publish -> stored-by-every-honest-peer delay.
  double measured_propagation() const;
  /// Mean tailing count over honest peers in the last half of the run.
  double steady_tailing() const;
  double steady_unconfirmed() const;
  /// Mean publish -> confirmed-at-generator delay for records published in
  /// the last half of the workload window.
  double mean_confirmation_latency() const;
  /// Honest records old enough to be held to liveness that never confirmed.
  std::size_t liveness_violations() const;
  /// Largest unconfirmed approval depth seen at any honest peer.
  std::size_t max_honest_depth() const { return max_depth_; }
  /// Honest records that broke interlock or contribution when created.
  std::size_t honest_policy_violations() const { return policy_violations_; }
  /// Every honest peer holds the same records, byte for byte.
  bool honest_sets_identical() const;

  /// The colluders' invalid record, once published.
  std::optional<RecordName> invalid_record() const;
  /// Honest peers at which the invalid record got confirmed.
  std::size_t honest_invalid_confirmations() const { return honest_invalid_confirmed_; }
  bool observer_confirmed_invalid() const { return observer_invalid_confirmed_; }

  /// Writes the requested artifacts; the DOT graph and dump show the first honest peer.
  void write_outputs(const std::filesystem::path& dir, const std::set<OutputFormat>& formats) const;

  const Bytes& scheme_seed() const { return scheme_seed_; }

private:
  class Tracker;

  void build();
  void start_workload();
  void sample();
  void on_publish(std::size_t peer, const Record& record, double now);
  void finalize();

  Scenario scenario_;
  net::Scheduler sched_;
  std::unique_ptr<net::Network> net_;
  Bytes scheme_seed_;
  std::shared_ptr<const SignatureScheme> scheme_;
  std::unique_ptr<IdentityManager> manager_;
  std::vector<std::shared_ptr<const Record>> genesis_;
  std::vector<std::unique_ptr<protocol::PeerDaemon>> peers_;
  std::vector<std::unique_ptr<Tracker>> trackers_;
  std::vector<Role> roles_;
  std::vector<std::size_t> honest_;
  std::vector<std::mt19937_64> workload_rng_;
  std::vector<std::uint64_t> workload_seq_;

  MetricsLog metrics_;
  std::unordered_map<RecordName, std::size_t, RecordNameHash> timeline_;
  std::shared_ptr<std::optional<RecordName>> invalid_;
  std::size_t max_depth_ = 0;
  std::size_t policy_violations_ = 0;
  std::size_t honest_invalid_confirmed_ = 0;
  bool observer_invalid_confirmed_ = false;
  bool finished_ = false;
};

/// Runs `scenario` to completion and returns its metrics.
MetricsLog run_scenario(const Scenario& scenario);

} // namespace dledger::sim
