#include "dledger/sim/adversary.hpp"

#include <algorithm>

namespace dledger::sim {

using protocol::PeerDaemon;

bool has_valid_payload(const Record& record)
{
  const auto& body = record.content.payload.body;
  return !(body.size() >= kInvalidMarker.size() &&
           std::equal(kInvalidMarker.begin(), kInvalidMarker.end(), body.begin()));
}

void schedule_poisson(net::Scheduler& sched, std::mt19937_64& rng, double rate, double until,
                      std::function<void()> action)
{
  std::exponential_distribution<double> gap(rate);
  const double t = sched.now() + gap(rng);
  if (t >= until)
    return;
  sched.schedule_at(t, [&sched, &rng, rate, until, action = std::move(action)]() mutable {
    action();
    schedule_poisson(sched, rng, rate, until, std::move(action));
  });
}

namespace {

/// Confirmed records of other generators, newest first.
std::vector<RecordName> confirmed_foreign(const LedgerState& l, const EntityId& self)
{
  std::vector<RecordName> out;
  auto all = l.confirmed_names();
  for (auto it = all.rbegin(); it != all.rend(); ++it)
    if (it->generator != self)
      out.push_back(*it);
  return out;
}

RecordPayload filler(const std::string& tag, std::uint64_t seq)
{
  return {PayloadKind::Application, to_bytes(tag + ":" + std::to_string(seq)), std::nullopt};
}

void publish_invalid(PeerDaemon* b, std::shared_ptr<std::optional<RecordName>> invalid)
{
  std::vector<RecordName> approved;
  try {
    approved = choose_approvals(b->ledger(), b->entity(), b->ledger().config().approvals_per_record, b->rng());
  } catch (const InsufficientCandidates&) {
    b->scheduler().schedule(0.5, [b, invalid] { publish_invalid(b, invalid); });
    return;
  }
  RecordPayload p{PayloadKind::Application, to_bytes(std::string(kInvalidMarker) + ":transfer"), std::nullopt};
  *invalid = b->publish_approving(std::move(approved), std::move(p));
}

void collude(PeerDaemon* c, std::shared_ptr<std::optional<RecordName>> invalid)
{
  auto& l = c->ledger();
  if (!*invalid || !l.contains(**invalid)) {
    c->scheduler().schedule(0.5, [c, invalid] { collude(c, invalid); });
    return;
  }
  std::vector<RecordName> approved{**invalid};
  auto pool = l.foreign_tailing(c->entity());
  auto rest = l.records_in_order();
  for (auto it = rest.rbegin(); it != rest.rend(); ++it)
    pool.push_back((*it)->name);
  for (const auto& cand : pool) {
    if (approved.size() >= l.config().approvals_per_record)
      break;
    if (cand.generator != c->entity() && std::find(approved.begin(), approved.end(), cand) == approved.end())
      approved.push_back(cand);
  }
  c->publish_approving(std::move(approved), {PayloadKind::Application, to_bytes("collude"), std::nullopt});
}

} // namespace

void run_spammer(PeerDaemon& peer, double rate, double until)
{
  auto last = std::make_shared<std::optional<RecordName>>();
  auto seq = std::make_shared<std::uint64_t>(0);
  auto& sched = peer.scheduler();
  schedule_poisson(sched, peer.rng(), rate, until, [&peer, last, seq] {
    auto old = confirmed_foreign(peer.ledger(), peer.entity());
    std::vector<RecordName> approved;
    std::uniform_int_distribution<std::size_t> coin(0, 1);
    if (*last && coin(peer.rng()) == 0)
      approved.push_back(**last);
    std::shuffle(old.begin(), old.end(), peer.rng());
    for (const auto& o : old) {
      if (approved.size() >= peer.ledger().config().approvals_per_record)
        break;
      if (std::find(approved.begin(), approved.end(), o) == approved.end())
        approved.push_back(o);
    }
    if (approved.size() < peer.ledger().config().approvals_per_record)
      return;
    *last = peer.publish_approving(std::move(approved), filler("spam", (*seq)++));
  });
}

void run_lazy(PeerDaemon& peer, double rate, double until)
{
  auto seq = std::make_shared<std::uint64_t>(0);
  schedule_poisson(peer.scheduler(), peer.rng(), rate, until, [&peer, seq] {
    auto old = confirmed_foreign(peer.ledger(), peer.entity());
    const auto n = peer.ledger().config().approvals_per_record;
    if (old.size() < n)
      return;
    old.resize(std::min<std::size_t>(old.size(), 4 * n));
    std::shuffle(old.begin(), old.end(), peer.rng());
    old.resize(n);
    peer.publish_approving(std::move(old), filler("lazy", (*seq)++));
  });
}

void run_notif_forger(PeerDaemon& peer, double rate, double until, int hops)
{
  auto seq = std::make_shared<std::uint64_t>(0);
  schedule_poisson(peer.scheduler(), peer.rng(), rate, until, [&peer, seq, hops] {
    auto& rng = peer.rng();
    const auto i = (*seq)++;
    auto known = peer.ledger().records_in_order();
    RecordName target;
    Bytes poa(32);
    for (auto& b : poa)
      b = static_cast<std::uint8_t>(rng());
    KeyLocator signer = peer.identity().signer_key;
    const auto& real = known[rng() % known.size()];
    switch (i % 3) {
    case 0: // nonexistent generator
      target.generator = EntityId("ghost" + std::to_string(i));
      for (auto& b : target.digest)
        b = static_cast<std::uint8_t>(rng());
      break;
    case 1: // real record, hash altered, its real PoA attached
      target = real->name;
      target.digest[rng() % target.digest.size()] ^= 0x01;
      poa = real->poa;
      signer = real->content.signer_key;
      break;
    default: // someone else's generator id under the forger's own key
      target = real->name;
      target.digest[0] ^= 0x80;
      break;
    }
    net::Interest interest;
    interest.name = protocol::notif_name(target);
    interest.parameter = std::make_shared<const Bytes>(protocol::encode_notif({poa, signer}));
    interest.nonce = peer.network().new_nonce();
    interest.hop_budget = hops;
    peer.express(std::move(interest));
  });
}

void run_colluders(PeerDaemon& beneficiary, std::vector<PeerDaemon*> colluders, double at,
                   std::shared_ptr<std::optional<RecordName>> invalid)
{
  auto& sched = beneficiary.scheduler();
  sched.schedule_at(at, [b = &beneficiary, invalid] { publish_invalid(b, invalid); });
  for (std::size_t i = 0; i < colluders.size(); ++i) {
    auto* c = colluders[i];
    sched.schedule_at(at + 1.0 + 0.1 * static_cast<double>(i), [c, invalid] { collude(c, invalid); });
  }
}

} // namespace dledger::sim
