#include "dledger/sim/simulation.hpp"

#include "dledger/ledger/export.hpp"
#include "dledger/sim/adversary.hpp"
#include "dledger/sim/oracle.hpp"
#include "dledger/sim/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace dledger::sim {

namespace {

std::uint64_t mix(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
{
  return mix(mix(seed) ^ mix(stream * 1000003ULL + index));
}

enum Stream : std::uint64_t
{
  kSchemeStream = 1,
  kIdentityStream,
  kNetworkStream,
  kDaemonStream,
  kWorkloadStream,
};

std::string label_of(std::size_t i) { return "p" + std::to_string(i); }

std::string fixed(double v) { return fmt::format("{:.6f}", v); }

} // namespace

/// Feeds one peer's ledger events into the run's metrics.
class Simulation::Tracker : public LedgerObserver
{
public:
  Tracker(Simulation& sim, std::size_t peer)
    : sim_(sim)
    , peer_(peer)
    , label_(label_of(peer))
  {
  }

  void on_accepted(const Record& record, double now) override
  {
    if (sim_.roles_[peer_] != Role::Honest)
      return;
    if (auto* t = timeline(record.name); t && ++t->stored_by == sim_.honest_.size())
      t->visible_all = now;
  }

  void on_confirmed(const Record& record, double now) override
  {
    if (!has_valid_payload(record)) {
      if (sim_.roles_[peer_] == Role::Honest)
        ++sim_.honest_invalid_confirmed_;
      else if (sim_.roles_[peer_] == Role::Observer)
        sim_.observer_invalid_confirmed_ = true;
    }
    if (sim_.roles_[peer_] != Role::Honest)
      return;
    auto* t = timeline(record.name);
    if (!t)
      return;
    if (record.generator() == sim_.peers_[peer_]->entity())
      t->confirmed_local = now;
    if (++t->confirmed_by == sim_.honest_.size())
      t->confirmed_all = now;
  }

  void on_rejected(const RecordName&, RejectReason reason, double) override
  {
    ++sim_.metrics_.rejections[label_][to_string(reason)];
  }

private:
  RecordTimeline* timeline(const RecordName& name)
  {
    auto it = sim_.timeline_.find(name);
    return it == sim_.timeline_.end() ? nullptr : &sim_.metrics_.records[it->second];
  }

  Simulation& sim_;
  std::size_t peer_;
  std::string label_;
};

Simulation::Simulation(Scenario scenario)
  : scenario_(std::move(scenario))
  , invalid_(std::make_shared<std::optional<RecordName>>())
{
  scenario_.validate();
  build();
}

Simulation::~Simulation() = default;

void Simulation::build()
{
  const auto& s = scenario_;
  const std::size_t count = s.entities;

  std::mt19937_64 seed_rng(stream_seed(s.seed, kSchemeStream, 0));
  scheme_seed_.resize(16);
  for (auto& b : scheme_seed_)
    b = static_cast<std::uint8_t>(seed_rng());
  try {
    scheme_ = make_signature_scheme(s.scheme, scheme_seed_);
  } catch (const std::invalid_argument& e) {
    throw ConfigInvalid(e.what());
  }

  // Roles.
  roles_.assign(count, Role::Honest);
  for (const auto& a : s.adversaries) {
    roles_.at(a.entity) = Role::Adversary;
    if (a.kind == AdversaryKind::Colluders) {
      for (std::size_t i = 1; i <= a.k; ++i)
        roles_.at(a.entity + i) = Role::Adversary;
      if (a.observer)
        roles_.at(*a.observer) = Role::Observer;
    }
  }
  for (std::size_t i = 0; i < count; ++i)
    if (roles_[i] == Role::Honest)
      honest_.push_back(i);

  // Identities.
  std::mt19937_64 id_rng(stream_seed(s.seed, kIdentityStream, 0));
  manager_ = std::make_unique<IdentityManager>(EntityId("mgr"), scheme_, id_rng);
  std::vector<Certificate> certs;
  std::vector<Bytes> private_keys;
  for (std::size_t i = 0; i < count; ++i) {
    auto keys = scheme_->generate_key(id_rng);
    certs.push_back(manager_->make_certificate(EntityId(label_of(i)), keys.public_key, 0.0));
    private_keys.push_back(std::move(keys.private_key));
  }
  genesis_ = manager_->make_genesis(certs);

  // Network.
  net::NetworkConfig nc;
  nc.seed = stream_seed(s.seed, kNetworkStream, 0);
  net_ = std::make_unique<net::Network>(sched_, nc);
  for (std::size_t i = 0; i < count; ++i)
    net_->add_node(label_of(i));
  net::LinkParams lp{s.latency, s.jitter, s.loss};
  auto link = [&](std::size_t a, std::size_t b) {
    net_->add_link(static_cast<net::NodeId>(a), static_cast<net::NodeId>(b), lp);
  };
  switch (s.topology) {
  case Topology::FullMesh:
    for (std::size_t a = 0; a < count; ++a)
      for (std::size_t b = a + 1; b < count; ++b)
        link(a, b);
    break;
  case Topology::Line:
    for (std::size_t a = 0; a + 1 < count; ++a)
      link(a, a + 1);
    break;
  case Topology::Grid:
    for (std::size_t a = 0; a < count; ++a) {
      if ((a + 1) % s.grid_width != 0 && a + 1 < count)
        link(a, a + 1);
      if (a + s.grid_width < count)
        link(a, a + s.grid_width);
    }
    break;
  case Topology::Edges:
    for (const auto& [a, b] : s.edges)
      link(a, b);
    break;
  }
  const int hops = s.notif_hops > 0 ? s.notif_hops : static_cast<int>(std::max<std::size_t>(1, net_->diameter()));

  // Ledgers and daemons.
  TrustStore trust;
  trust.add_root(manager_->root_certificate());
  LedgerConfig lc;
  lc.approvals_per_record = s.n;
  lc.w_confirm = s.w_confirm;
  lc.w_contribution = s.effective_w_contribution();
  lc.count_self_indirect = s.count_self_indirect;
  lc.unconfirmed_ttl = s.unconfirmed_ttl;
  lc.archive_depth = s.archive_depth;
  lc.max_payload = std::max(lc.max_payload, s.payload_bytes);
  try {
    lc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigInvalid(e.what());
  }

  auto passive = [&](std::size_t i) {
    if (roles_[i] == Role::Observer)
      return true;
    for (const auto& a : s.adversaries)
      if (a.kind == AdversaryKind::Colluders && i >= a.entity && i <= a.entity + a.k)
        return true;
    return false;
  };
  auto kind_of = [&](std::size_t i) -> std::optional<AdversaryKind> {
    for (const auto& a : s.adversaries)
      if (a.entity == i)
        return a.kind;
    return std::nullopt;
  };

  for (std::size_t i = 0; i < count; ++i) {
    LedgerConfig cfg = lc;
    AppValidator validator = has_valid_payload;
    if (passive(i)) {
      cfg.enforce_contribution = false;
      validator = {};
    }
    LedgerState ledger(cfg, trust, scheme_, validator);
    for (const auto& g : genesis_)
      ledger.inject_genesis(g);

    protocol::DaemonConfig dc;
    dc.sync_interval = s.sync_interval;
    dc.notif_hop_budget = hops;
    dc.maintenance_interval = s.maintenance_interval;
    if (auto k = kind_of(i); k == AdversaryKind::Spammer || k == AdversaryKind::Lazy)
      dc.self_admit = false;

    SigningIdentity id{EntityId(label_of(i)), genesis_[i]->name, private_keys[i]};
    peers_.push_back(std::make_unique<protocol::PeerDaemon>(*net_, static_cast<net::NodeId>(i), std::move(ledger),
                                                            std::move(id), dc,
                                                            stream_seed(s.seed, kDaemonStream, i)));
  }

  for (std::size_t i = 0; i < count; ++i) {
    auto& p = *peers_[i];
    trackers_.push_back(std::make_unique<Tracker>(*this, i));
    p.ledger().set_observer(trackers_.back().get());
    const auto label = label_of(i);
    p.set_security_hook([this, label](const std::string& kind, const std::string& detail) {
      metrics_.security.push_back({sched_.now(), label, kind, detail});
    });
    if (roles_[i] == Role::Honest)
      p.set_publish_hook([this, i](const Record& r, double now) { on_publish(i, r, now); });
  }

  for (auto& p : peers_)
    p->start();
  net_->compute_routes();
  for (const auto& part : s.partitions) {
    std::vector<std::vector<net::NodeId>> groups;
    for (const auto& g : part.groups)
      groups.emplace_back(g.begin(), g.end());
    net_->set_partition(groups, part.from, part.to);
  }
}

void Simulation::on_publish(std::size_t peer, const Record& record, double now)
{
  const auto& ledger = peers_[peer]->ledger();
  const auto& self = peers_[peer]->entity();
  for (const auto& a : record.content.approved) {
    if (a.generator == self || !ledger.contains(a)) {
      ++policy_violations_;
      break;
    }
    if (!ledger.is_genesis(a) && ledger.weight(a) >= ledger.config().w_contribution) {
      ++policy_violations_;
      break;
    }
  }
  RecordTimeline t;
  t.name = record.name.to_uri();
  t.generator = self.str();
  t.published = now;
  timeline_.emplace(record.name, metrics_.records.size());
  metrics_.records.push_back(std::move(t));
}

void Simulation::start_workload()
{
  const auto& s = scenario_;
  const double until = s.effective_publish_until();
  workload_rng_.clear();
  workload_seq_.assign(peers_.size(), 0);
  for (std::size_t i = 0; i < peers_.size(); ++i)
    workload_rng_.emplace_back(stream_seed(s.seed, kWorkloadStream, i));
  for (auto i : honest_) {
    schedule_poisson(sched_, workload_rng_[i], s.lambda, until, [this, i] {
      std::string body = fmt::format("ok:{}:{}", label_of(i), workload_seq_[i]++);
      if (body.size() < scenario_.payload_bytes)
        body.resize(scenario_.payload_bytes, '.');
      peers_[i]->publish({PayloadKind::Application, to_bytes(body), std::nullopt});
    });
  }

  for (const auto& a : s.adversaries) {
    auto& p = *peers_[a.entity];
    switch (a.kind) {
    case AdversaryKind::Idle:
      break;
    case AdversaryKind::Spammer:
      run_spammer(p, a.rate, until);
      break;
    case AdversaryKind::Lazy:
      run_lazy(p, a.rate, until);
      break;
    case AdversaryKind::NotifForger:
      run_notif_forger(p, a.rate, until, p.config().notif_hop_budget);
      break;
    case AdversaryKind::Colluders: {
      std::vector<protocol::PeerDaemon*> colluders;
      for (std::size_t i = 1; i <= a.k; ++i)
        colluders.push_back(peers_[a.entity + i].get());
      run_colluders(p, std::move(colluders), a.at, invalid_);
      break;
    }
    }
  }

  for (double t = s.sample_interval; t <= s.duration + 1e-9; t += s.sample_interval)
    sched_.schedule_at(t, [this] { sample(); });
}

void Simulation::sample()
{
  const double now = sched_.now();
  for (auto i : honest_) {
    const auto& l = peers_[i]->ledger();
    PeerSample s;
    s.time = now;
    s.peer = label_of(i);
    s.unconfirmed = l.unconfirmed_count();
    s.tailing = l.tailing_count();
    s.stored = l.size();
    s.pending = l.pending_count();
    s.depth = l.max_unconfirmed_depth();
    max_depth_ = std::max(max_depth_, s.depth);
    metrics_.samples.push_back(std::move(s));
  }
}

void Simulation::run()
{
  if (finished_)
    return;
  start_workload();
  sched_.run_until(scenario_.duration);
  finalize();
  finished_ = true;
}

void Simulation::finalize()
{
  for (std::size_t l = 0; l < net_->link_count(); ++l) {
    auto [a, b] = net_->endpoints(static_cast<net::LinkId>(l));
    const auto& st = net_->link_stats(static_cast<net::LinkId>(l));
    metrics_.links.push_back({net_->label(a), net_->label(b), st.interests[0], st.interests[1], st.data[0],
                              st.data[1], st.dropped_down + st.dropped_loss});
  }

  const auto& s = scenario_;
  const double T = measured_propagation();
  const double lambda_system = s.lambda * static_cast<double>(honest_.size());
  std::uint64_t transmissions = 0;
  for (std::size_t l = 0; l < net_->link_count(); ++l)
    transmissions += net_->link_stats(static_cast<net::LinkId>(l)).transmissions();

  auto& out = metrics_.summary;
  out.emplace_back("records_published", std::to_string(metrics_.records.size()));
  out.emplace_back("measured_T", fixed(T));
  out.emplace_back("steady_tailing", fixed(steady_tailing()));
  out.emplace_back("predicted_tailing", fixed(predicted_tailing(s.n, lambda_system, T)));
  out.emplace_back("steady_unconfirmed", fixed(steady_unconfirmed()));
  out.emplace_back("mean_confirmation_latency", fixed(mean_confirmation_latency()));
  if (s.w_confirm <= s.entities)
    out.emplace_back("confirmation_bound", fixed(confirmation_bound(s.entities, s.w_confirm, s.n, T)));
  out.emplace_back("liveness_violations", std::to_string(liveness_violations()));
  out.emplace_back("max_honest_depth", std::to_string(max_depth_));
  out.emplace_back("honest_policy_violations", std::to_string(policy_violations_));
  out.emplace_back("honest_sets_identical", honest_sets_identical() ? "true" : "false");
  out.emplace_back("transmissions", std::to_string(transmissions));
  if (*invalid_) {
    out.emplace_back("invalid_record", (*invalid_)->to_uri());
    out.emplace_back("honest_invalid_confirmations", std::to_string(honest_invalid_confirmed_));
    out.emplace_back("observer_confirmed_invalid", observer_invalid_confirmed_ ? "true" : "false");
  }
}

namespace {

bool in_steady_window(const RecordTimeline& t, const Scenario& s)
{
  return t.published >= s.effective_publish_until() / 2 && t.published <= s.duration - s.liveness_grace;
}

} // namespace

double Simulation::measured_propagation() const
{
  std::vector<double> delays;
  for (const auto& t : metrics_.records)
    if (t.visible_all && in_steady_window(t, scenario_))
      delays.push_back(*t.visible_all - t.published);
  if (delays.empty())
    for (const auto& t : metrics_.records)
      if (t.visible_all)
        delays.push_back(*t.visible_all - t.published);
  return mean(delays);
}

double Simulation::steady_tailing() const
{
  return mean(tail(metrics_.series(&PeerSample::tailing)));
}

double Simulation::steady_unconfirmed() const
{
  return mean(tail(metrics_.series(&PeerSample::unconfirmed)));
}

double Simulation::mean_confirmation_latency() const
{
  std::vector<double> delays;
  for (const auto& t : metrics_.records)
    if (t.confirmed_local && in_steady_window(t, scenario_))
      delays.push_back(*t.confirmed_local - t.published);
  return mean(delays);
}

std::size_t Simulation::liveness_violations() const
{
  std::size_t out = 0;
  for (const auto& t : metrics_.records)
    if (t.published <= scenario_.duration - scenario_.liveness_grace && !t.confirmed_local)
      ++out;
  return out;
}

bool Simulation::honest_sets_identical() const
{
  std::optional<std::vector<Bytes>> first;
  for (auto i : honest_) {
    std::vector<Bytes> wire;
    for (const auto& r : peers_[i]->ledger().history())
      wire.push_back(encode_record(*r));
    std::sort(wire.begin(), wire.end());
    if (!first)
      first = std::move(wire);
    else if (*first != wire)
      return false;
  }
  return true;
}

std::optional<RecordName> Simulation::invalid_record() const { return *invalid_; }

void Simulation::write_outputs(const std::filesystem::path& dir, const std::set<OutputFormat>& formats) const
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create " + dir.string() + ": " + ec.message());
  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f)
      throw IoError("cannot write " + p.string());
    return f;
  };
  if (formats.contains(OutputFormat::Csv))
    metrics_.write_csv(dir);
  if (honest_.empty())
    return;
  const auto& first = peers_[honest_.front()]->ledger();
  if (formats.contains(OutputFormat::Dot)) {
    auto f = open(dir / "ledger.dot");
    write_dot(f, first);
  }
  if (formats.contains(OutputFormat::Dump)) {
    const double now = sched_.now();
    {
      auto f = open(dir / "ledger.dump");
      write_dump(f, header_for(first, scheme_seed_, now), first.history());
    }
    std::filesystem::create_directories(dir / "peers", ec);
    if (ec)
      throw IoError("cannot create " + (dir / "peers").string());
    for (std::size_t i = 0; i < peers_.size(); ++i) {
      const auto& l = peers_[i]->ledger();
      auto f = open(dir / "peers" / (label_of(i) + ".dump"));
      write_dump(f, header_for(l, scheme_seed_, now), l.history());
    }
  }
}

MetricsLog run_scenario(const Scenario& scenario)
{
  Simulation sim(scenario);
  sim.run();
  return sim.metrics();
}

} // namespace dledger::sim
