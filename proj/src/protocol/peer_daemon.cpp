#include "dledger/protocol/peer_daemon.hpp"

#include <spdlog/spdlog.h>

namespace dledger::protocol {

namespace {
constexpr std::size_t kWireCacheCap = 4096;
}

PeerDaemon::PeerDaemon(net::Network& net, net::NodeId node, LedgerState ledger,
                       SigningIdentity identity, DaemonConfig config, std::uint64_t seed)
  : net_(net)
  , sched_(net.scheduler())
  , node_(node)
  , ledger_(std::move(ledger))
  , identity_(std::move(identity))
  , config_(std::move(config))
  , rng_(seed)
{
  if (config_.fetch_timeouts.empty())
    throw std::invalid_argument("need at least one fetch timeout");
}

void PeerDaemon::start()
{
  net_.attach_app(node_, this);
  net_.add_multicast_prefix(net::Name("/" + std::string(kLedgerPrefix)));
  net_.register_prefix(node_, net::Name("/" + std::string(kLedgerPrefix)));
  net_.register_prefix(node_, net::Name::from_components({std::string(kLedgerPrefix), entity().str()}));

  if (config_.sync_enabled && config_.sync_interval > 0) {
    std::uniform_real_distribution<double> offset(0.0, config_.sync_interval);
    sched_.schedule(offset(rng_), [this] { sync_tick(); });
  }
  if (config_.maintenance_interval > 0)
    sched_.schedule(config_.maintenance_interval, [this] { maintenance(); });
}

void PeerDaemon::sync_tick()
{
  run_sync();
  sched_.schedule(config_.sync_interval, [this] { sync_tick(); });
}

void PeerDaemon::maintenance()
{
  ledger_.prune_and_archive(sched_.now());
  sched_.schedule(config_.maintenance_interval, [this] { maintenance(); });
}

void PeerDaemon::security_event(const std::string& kind, const std::string& detail)
{
  spdlog::debug("{} security event {}: {}", entity().str(), kind, detail);
  if (security_)
    security_(kind, detail);
}

// --- publication -------------------------------------------------------------

std::optional<RecordName> PeerDaemon::publish(RecordPayload payload)
{
  if (!backlog_.empty()) {
    enqueue(std::move(payload));
    drain_backlog();
    return std::nullopt;
  }
  auto name = try_publish(payload);
  if (!name)
    enqueue(std::move(payload));
  return name;
}

std::optional<RecordName> PeerDaemon::try_publish(const RecordPayload& payload)
{
  std::vector<RecordName> approved;
  try {
    approved = picker_ ? picker_(ledger_, rng_)
                       : choose_approvals(ledger_, entity(), ledger_.config().approvals_per_record, rng_);
  } catch (const InsufficientCandidates&) {
    ++stats_.insufficient_candidates;
    return std::nullopt;
  }
  return publish_approving(std::move(approved), payload);
}

void PeerDaemon::enqueue(RecordPayload payload)
{
  if (backlog_.size() >= config_.backlog_cap) {
    backlog_.pop_front();
    ++stats_.backlog_dropped;
  }
  backlog_.push_back(std::move(payload));
}

void PeerDaemon::drain_backlog()
{
  if (backlog_scheduled_ || backlog_.empty())
    return;
  backlog_scheduled_ = true;
  sched_.schedule(0.0, [this] {
    backlog_scheduled_ = false;
    while (!backlog_.empty() && try_publish(backlog_.front()))
      backlog_.pop_front();
  });
}

RecordName PeerDaemon::publish_approving(std::vector<RecordName> approved, RecordPayload payload)
{
  auto record = std::make_shared<const Record>(
    create_record_approving(identity_, std::move(approved), std::move(payload), ledger_.scheme()));
  ++stats_.published;
  if (on_publish_)
    on_publish_(*record, sched_.now());
  if (config_.self_admit) {
    AdmitOptions opts;
    opts.poa_preverified = true;
    auto outcome = ledger_.admit(record, Arrival::Tailing, sched_.now(), opts);
    if (!outcome.verdict.is_accepted()) {
      spdlog::warn("{} could not admit its own record {}", entity().str(), record->name.to_uri());
      handle_outcome(outcome);
      return record->name;
    }
  } else {
    own_.emplace(record->name, record);
  }
  announce(record);
  return record->name;
}

void PeerDaemon::announce(std::shared_ptr<const Record> record)
{
  if (!config_.self_admit)
    own_.emplace(record->name, record);
  net::Interest notif;
  notif.name = notif_name(record->name);
  notif.parameter = std::make_shared<const Bytes>(encode_notif({record->poa, record->content.signer_key}));
  notif.nonce = net_.new_nonce();
  notif.hop_budget = config_.notif_hop_budget;
  ++stats_.notifs_sent;
  net_.express_interest(node_, std::move(notif));
}

void PeerDaemon::express(net::Interest interest)
{
  net_.express_interest(node_, std::move(interest));
}

// --- serving -----------------------------------------------------------------

std::shared_ptr<const Bytes> PeerDaemon::wire_of(const Record& record)
{
  if (auto it = wire_cache_.find(record.name); it != wire_cache_.end())
    return it->second;
  auto wire = std::make_shared<const Bytes>(encode_record(record));
  if (wire_cache_.size() >= kWireCacheCap) {
    wire_cache_.erase(wire_order_.front());
    wire_order_.pop_front();
  }
  wire_cache_.emplace(record.name, wire);
  wire_order_.push_back(record.name);
  return wire;
}

void PeerDaemon::serve(const net::Interest& interest, const RecordName& name)
{
  auto record = ledger_.find_any(name);
  if (!record)
    if (auto it = own_.find(name); it != own_.end())
      record = it->second;
  if (!record)
    return;
  ++stats_.records_served;
  net_.put_data(node_, {interest.name, wire_of(*record), record->poa});
}

void PeerDaemon::on_interest(const net::Interest& interest)
{
  if (auto name = record_from_notif(interest.name))
    handle_notif(interest, *name);
  else if (is_sync_name(interest.name))
    handle_sync(interest);
  else if (auto rec = record_from_name(interest.name))
    serve(interest, *rec);
}

// --- notifications -----------------------------------------------------------

void PeerDaemon::handle_notif(const net::Interest& interest, const RecordName& name)
{
  ++stats_.notifs_received;
  if (!config_.follow_notifs || ledger_.knows(name) || fetches_.contains(name) || own_.contains(name))
    return;
  NotifParameter param;
  try {
    param = decode_notif(interest.parameter_bytes());
  } catch (const DecodeError& e) {
    ++stats_.notif_poa_invalid;
    security_event("NotifPoAInvalid", name.to_uri() + ": " + e.what());
    return;
  }
  auto signer = ledger_.resolve_signer(param.signer_key, sched_.now());
  if (!signer && signer.error == ResolveError::NotConfirmed) {
    // Probably a freshly certified peer; sync will pick the record up later.
    ++stats_.notif_unverifiable;
    return;
  }
  bool ok = signer && signer.certificate->subject == name.generator &&
            verify_name_signature(name, param.poa, ledger_.scheme(), signer.certificate->public_key);
  if (!ok) {
    ++stats_.notif_poa_invalid;
    security_event("NotifPoAInvalid", name.to_uri());
    return;
  }
  fetch(name, FetchMode::Notif, std::move(param));
}

// --- fetching ----------------------------------------------------------------

void PeerDaemon::fetch(const RecordName& name, FetchMode mode, NotifParameter notif)
{
  if (fetches_.contains(name))
    return;
  requeue_.erase(name);
  Fetch f;
  f.mode = mode;
  f.notif = std::move(notif);
  fetches_.emplace(name, std::move(f));
  send_fetch(name);
}

void PeerDaemon::send_fetch(const RecordName& name)
{
  auto& f = fetches_.at(name);
  net::Interest i;
  i.name = record_net_name(name);
  i.nonce = net_.new_nonce();
  ++stats_.fetches_sent;
  f.timer = sched_.schedule(config_.fetch_timeouts[f.attempt], [this, name] { on_fetch_timeout(name); });
  net_.express_interest(node_, std::move(i));
}

void PeerDaemon::on_fetch_timeout(const RecordName& name)
{
  auto it = fetches_.find(name);
  if (it == fetches_.end())
    return;
  if (++it->second.attempt < config_.fetch_timeouts.size()) {
    ++stats_.fetch_retries;
    send_fetch(name);
    return;
  }
  ++stats_.fetch_giveups;
  fetches_.erase(it);
  requeue_.insert(name);
}

void PeerDaemon::on_data(const net::DataPacket& data)
{
  auto name = record_from_name(data.name);
  if (!name)
    return;
  auto it = fetches_.find(*name);
  if (it == fetches_.end())
    return;
  Fetch f = std::move(it->second);
  fetches_.erase(it);
  sched_.cancel(f.timer);

  std::shared_ptr<const Record> record;
  try {
    if (!data.content)
      throw DecodeError("empty content");
    record = std::make_shared<const Record>(decode_record(*data.content, ledger_.config().max_payload));
  } catch (const std::exception& e) {
    ++stats_.bad_data;
    security_event("BadRecordData", name->to_uri() + ": " + e.what());
    requeue_.insert(*name);
    return;
  }
  if (record->name != *name) {
    ++stats_.bad_data;
    security_event("BadRecordData", name->to_uri() + ": name mismatch");
    requeue_.insert(*name);
    return;
  }
  handle_record(*name, f, std::move(record));
}

void PeerDaemon::handle_record(const RecordName& name, const Fetch& fetch,
                               std::shared_ptr<const Record> record)
{
  Arrival arrival = Arrival::Backfill;
  AdmitOptions opts;
  if (fetch.mode == FetchMode::Notif) {
    if (record->poa == fetch.notif.poa && record->content.signer_key == fetch.notif.signer_key) {
      arrival = Arrival::Tailing;
      opts.poa_preverified = true;
    } else {
      ++stats_.notif_mismatch;
      security_event("NotifMismatch", name.to_uri());
    }
  }
  handle_outcome(ledger_.admit(std::move(record), arrival, sched_.now(), opts));
}

void PeerDaemon::handle_outcome(const AdmitOutcome& outcome)
{
  const auto& v = outcome.verdict;
  if (v.is_pending()) {
    for (const auto& m : v.missing)
      if (!ledger_.knows(m))
        fetch(m, FetchMode::Sync);
  } else if (v.is_rejected() && v.reason != RejectReason::DuplicateName) {
    ++stats_.rejections[v.reason];
  }
  if (v.is_accepted())
    drain_backlog();
}

// --- synchronization ---------------------------------------------------------

void PeerDaemon::run_sync()
{
  auto requeued = std::move(requeue_);
  requeue_.clear();
  for (const auto& name : requeued)
    if (!ledger_.knows(name))
      fetch(name, FetchMode::Sync);
  send_sync(false);
}

void PeerDaemon::send_sync(bool reply)
{
  const double now = sched_.now();
  if (reply && now - last_sync_ < config_.sync_min_gap)
    return;
  last_sync_ = now;
  const auto& td = local_digest();
  for (const auto& chunk : chunk_sync(td.names)) {
    net::Interest i;
    i.name = sync_name(td.digest, entity(), chunk.seq);
    i.parameter = std::make_shared<const Bytes>(encode_sync(chunk));
    i.nonce = net_.new_nonce();
    i.hop_budget = config_.sync_hop_budget;
    net_.express_interest(node_, std::move(i));
  }
  ++(reply ? stats_.sync_replies : stats_.syncs_sent);
}

void PeerDaemon::handle_sync(const net::Interest& interest)
{
  ++stats_.syncs_received;
  if (interest.name.size() >= 4 && interest.name.component(3) == entity().str())
    return;
  SyncChunk chunk;
  try {
    chunk = decode_sync(interest.parameter_bytes());
  } catch (const DecodeError&) {
    ++stats_.malformed_sync;
    security_event("MalformedSyncParameter", interest.name.uri());
    return;
  }

  const auto& local = local_digest();
  if (interest.name.size() >= 3 && interest.name.component(2) == to_hex(local.digest))
    return;

  const double now = sched_.now();
  bool sender_behind = false;
  for (const auto& name : chunk.names) {
    if (ledger_.contains(name)) {
      if (!sender_behind && !ledger_.is_tailing(name))
        for (const auto& child : ledger_.children(name))
          if (settled(child, now)) {
            sender_behind = true;
            break;
          }
    } else if (ledger_.is_deferred(name)) {
      // The sender stores it; sync arrivals skip the contribution check.
      handle_outcome(ledger_.admit(ledger_.find_any(name), Arrival::Backfill, now));
    } else if (!ledger_.knows(name) && !own_.contains(name)) {
      fetch(name, FetchMode::Sync);
    }
  }
  if (chunk.total == 1 && !sender_behind) {
    std::set<RecordName> theirs(chunk.names.begin(), chunk.names.end());
    for (const auto& name : local_digest().names)
      if (!theirs.contains(name) && settled(name, now)) {
        sender_behind = true;
        break;
      }
  }
  if (sender_behind)
    send_sync(true);
}

const TailingDigest& PeerDaemon::local_digest()
{
  if (digest_version_ != ledger_.tailing_version()) {
    digest_ = TailingDigest::of(ledger_.tailing());
    digest_version_ = ledger_.tailing_version();
  }
  return digest_;
}

bool PeerDaemon::settled(const RecordName& name, double now) const
{
  auto t = ledger_.arrival_time(name);
  return t && *t <= now - config_.sync_reply_grace;
}

void PeerDaemon::on_link_up()
{
  if (config_.sync_enabled)
    run_sync();
}

} // namespace dledger::protocol
