#pragma once

#include "dledger/ledger/record_builder.hpp"
#include "dledger/net/network.hpp"
#include "dledger/protocol/wire.hpp"

#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <unordered_map>

namespace dledger::protocol {

struct DaemonConfig
{
  double sync_interval = 10.0;
  /// Minimum gap between two Sync Interests from this peer (replies included).
  double sync_min_gap = 1.0;
  /// A peer counts as behind only for records it has had this long to learn.
  double sync_reply_grace = 2.0;
  /// Timeouts between fetch attempts; after the last one the fetch is parked
  /// until the next sync round.
  std::vector<double> fetch_timeouts{1.0, 2.0, 4.0};
  int notif_hop_budget = 32;
  int sync_hop_budget = 1;
  /// Period of prune_and_archive; 0 disables maintenance.
  double maintenance_interval = 0.0;
  std::size_t backlog_cap = 1024;
  /// Whether own records go through the local ledger before being announced.
  bool self_admit = true;
  /// Whether periodic sync runs at all.
  bool sync_enabled = true;
  /// Whether notifications trigger fetches.
  bool follow_notifs = true;
};

struct DaemonStats
{
  std::uint64_t published = 0;
  std::uint64_t insufficient_candidates = 0;
  std::uint64_t backlog_dropped = 0;
  std::uint64_t notifs_sent = 0;
  std::uint64_t notifs_received = 0;
  std::uint64_t notif_poa_invalid = 0;
  std::uint64_t notif_unverifiable = 0;
  std::uint64_t notif_mismatch = 0;
  std::uint64_t syncs_sent = 0;
  std::uint64_t sync_replies = 0;
  std::uint64_t syncs_received = 0;
  std::uint64_t malformed_sync = 0;
  std::uint64_t fetches_sent = 0;
  std::uint64_t fetch_retries = 0;
  std::uint64_t fetch_giveups = 0;
  std::uint64_t records_served = 0;
  std::uint64_t bad_data = 0;
  std::map<RejectReason, std::uint64_t> rejections;
};

/// Peer engine binding one ledger to one network node: publishes records with
/// a multicast notification, fetches announced and missing records by name,
/// and runs periodic and recovery synchronization of tailing sets.
class PeerDaemon : public net::NetApp
{
public:
  /// Overrides approval selection (adversary models).
  using ApprovalPicker = std::function<std::vector<RecordName>(const LedgerState&, std::mt19937_64&)>;
  using SecurityHook = std::function<void(const std::string& kind, const std::string& detail)>;
  /// Called for every record this peer publishes.
  using PublishHook = std::function<void(const Record&, double now)>;

  PeerDaemon(net::Network& net, net::NodeId node, LedgerState ledger, SigningIdentity identity,
             DaemonConfig config, std::uint64_t seed);

  PeerDaemon(const PeerDaemon&) = delete;
  PeerDaemon& operator=(const PeerDaemon&) = delete;

  /// Registers prefixes and schedules the periodic timers.
  void start();

  /// Creates, stores and announces a record. Returns nullopt when no approval
  /// candidates are available; the payload then waits in a backlog.
  std::optional<RecordName> publish(RecordPayload payload);
  /// Publishes a record with the given approvals (no candidate selection).
  RecordName publish_approving(std::vector<RecordName> approved, RecordPayload payload);
  /// Announces an already sealed record and serves it.
  void announce(std::shared_ptr<const Record> record);

  void run_sync();
  /// Sends a raw Interest from this node.
  void express(net::Interest interest);

  void on_interest(const net::Interest& interest) override;
  void on_data(const net::DataPacket& data) override;
  void on_link_up() override;

  LedgerState& ledger() { return ledger_; }
  const LedgerState& ledger() const { return ledger_; }
  const SigningIdentity& identity() const { return identity_; }
  const EntityId& entity() const { return identity_.entity; }
  net::NodeId node() const { return node_; }
  net::Network& network() { return net_; }
  net::Scheduler& scheduler() { return sched_; }
  const DaemonStats& stats() const { return stats_; }
  const DaemonConfig& config() const { return config_; }
  std::mt19937_64& rng() { return rng_; }
  std::size_t outstanding_fetches() const { return fetches_.size(); }
  std::size_t backlog() const { return backlog_.size(); }

  void set_approval_picker(ApprovalPicker picker) { picker_ = std::move(picker); }
  void set_security_hook(SecurityHook hook) { security_ = std::move(hook); }
  void set_publish_hook(PublishHook hook) { on_publish_ = std::move(hook); }

private:
  enum class FetchMode
  {
    Notif,
    Sync,
  };

  struct Fetch
  {
    FetchMode mode = FetchMode::Sync;
    NotifParameter notif;
    std::size_t attempt = 0;
    net::EventId timer = 0;
  };

  std::optional<RecordName> try_publish(const RecordPayload& payload);
  void enqueue(RecordPayload payload);
  void fetch(const RecordName& name, FetchMode mode, NotifParameter notif = {});
  void send_fetch(const RecordName& name);
  void on_fetch_timeout(const RecordName& name);
  void handle_record(const RecordName& name, const Fetch& fetch, std::shared_ptr<const Record> record);
  void handle_outcome(const AdmitOutcome& outcome);
  void handle_notif(const net::Interest& interest, const RecordName& name);
  void handle_sync(const net::Interest& interest);
  void serve(const net::Interest& interest, const RecordName& name);
  void send_sync(bool reply);
  void drain_backlog();
  void sync_tick();
  void maintenance();
  void security_event(const std::string& kind, const std::string& detail);
  std::shared_ptr<const Bytes> wire_of(const Record& record);
  const TailingDigest& local_digest();
  bool settled(const RecordName& name, double now) const;

  net::Network& net_;
  net::Scheduler& sched_;
  net::NodeId node_;
  LedgerState ledger_;
  SigningIdentity identity_;
  DaemonConfig config_;
  std::mt19937_64 rng_;
  DaemonStats stats_;

  std::unordered_map<RecordName, Fetch, RecordNameHash> fetches_;
  std::set<RecordName> requeue_;
  // Own records kept outside the ledger (self_admit off).
  std::unordered_map<RecordName, std::shared_ptr<const Record>, RecordNameHash> own_;
  std::unordered_map<RecordName, std::shared_ptr<const Bytes>, RecordNameHash> wire_cache_;
  std::deque<RecordName> wire_order_;
  std::deque<RecordPayload> backlog_;
  bool backlog_scheduled_ = false;
  double last_sync_ = -1e300;
  TailingDigest digest_;
  std::uint64_t digest_version_ = ~std::uint64_t{0};

  ApprovalPicker picker_;
  SecurityHook security_;
  PublishHook on_publish_;
};

} // namespace dledger::protocol
