#include "dledger/ledger/ledger_state.hpp"

#include <algorithm>
#include <cmath>

namespace dledger {

LedgerConfig LedgerConfig::with_defaults(std::size_t n, std::uint32_t w_confirm)
{
  LedgerConfig c;
  c.approvals_per_record = n;
  c.w_confirm = w_confirm;
  c.w_contribution = std::max<std::uint32_t>(1, w_confirm / 4);
  return c;
}

void LedgerConfig::validate() const
{
  if (approvals_per_record < 2)
    throw std::invalid_argument("approvals per record must be at least 2");
  if (w_confirm == 0)
    throw std::invalid_argument("w_confirm must be positive");
  // With w_confirm == 1 the strict ordering is unsatisfiable; the tightest
  // policy (only zero-weight records are approvable) is used instead.
  bool ok = w_confirm == 1 ? w_contribution == 1
                           : (w_contribution > 0 && w_contribution < w_confirm);
  if (!ok)
    throw std::invalid_argument("need 0 < w_contribution < w_confirm");
  if (!(unconfirmed_ttl > 0))
    throw std::invalid_argument("unconfirmed_ttl must be positive");
  if (pending_cap == 0)
    throw std::invalid_argument("pending_cap must be positive");
}

std::string to_string(RejectReason reason)
{
  switch (reason) {
  case RejectReason::PoAInvalid: return "PoAInvalid";
  case RejectReason::CertNotConfirmed: return "CertNotConfirmed";
  case RejectReason::CertRevoked: return "CertRevoked";
  case RejectReason::SelfApproval: return "SelfApproval";
  case RejectReason::ContributionViolation: return "ContributionViolation";
  case RejectReason::AppRejected: return "AppRejected";
  case RejectReason::DuplicateName: return "DuplicateName";
  case RejectReason::DigestMismatch: return "DigestMismatch";
  case RejectReason::Malformed: return "Malformed";
  case RejectReason::InvalidAncestor: return "InvalidAncestor";
  }
  return "?";
}

// PoA and digest failures are not bound to the name (the PoA is outside the
// digest), so remembering them would let anyone poison a valid name.
bool is_transient(RejectReason reason)
{
  switch (reason) {
  case RejectReason::PoAInvalid:
  case RejectReason::CertNotConfirmed:
  case RejectReason::ContributionViolation:
  case RejectReason::DuplicateName:
  case RejectReason::DigestMismatch:
    return true;
  default:
    return false;
  }
}

LedgerState::LedgerState(LedgerConfig config, TrustStore trust,
                         std::shared_ptr<const SignatureScheme> scheme, AppValidator validator)
  : config_(config)
  , trust_(std::move(trust))
  , scheme_(std::move(scheme))
  , validator_(std::move(validator))
{
  config_.validate();
  if (!scheme_)
    throw std::invalid_argument("ledger needs a signature scheme");
}

std::uint32_t LedgerState::entity_index(const EntityId& id)
{
  auto [it, inserted] = entities_.try_emplace(id, static_cast<std::uint32_t>(entity_names_.size()));
  if (inserted)
    entity_names_.push_back(id);
  return it->second;
}

std::uint32_t LedgerState::slot_of(const RecordName& name) const
{
  auto it = index_.find(name);
  return it == index_.end() ? kNoSlot : it->second;
}

const LedgerState::Node& LedgerState::node(const RecordName& name) const
{
  auto slot = slot_of(name);
  if (slot == kNoSlot)
    throw UnknownRecord(name);
  return nodes_[slot];
}

std::uint32_t LedgerState::allocate_slot()
{
  if (!free_slots_.empty()) {
    auto slot = free_slots_.back();
    free_slots_.pop_back();
    return slot;
  }
  nodes_.emplace_back();
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::uint32_t LedgerState::effective_weight(const Node& n) const
{
  if (n.genesis)
    return std::max<std::uint32_t>(config_.w_confirm, static_cast<std::uint32_t>(entities_.size()));
  auto c = n.approvers.count();
  if (!config_.count_self_indirect && n.approvers.test(n.generator))
    --c;
  return c;
}

void LedgerState::add_tailing(std::uint32_t slot)
{
  nodes_[slot].tailing_pos = static_cast<std::uint32_t>(tailing_.size());
  tailing_.push_back(slot);
  ++tailing_version_;
}

void LedgerState::remove_tailing(std::uint32_t slot)
{
  auto pos = nodes_[slot].tailing_pos;
  auto last = tailing_.back();
  tailing_[pos] = last;
  nodes_[last].tailing_pos = pos;
  tailing_.pop_back();
  nodes_[slot].tailing_pos = kNoSlot;
  ++tailing_version_;
}

// --- admission ---------------------------------------------------------------

void LedgerState::inject_genesis(std::shared_ptr<const Record> record, double now)
{
  const Record& r = *record;
  if (r.kind() != PayloadKind::Genesis || !r.approved().empty())
    throw std::invalid_argument("not a genesis record: " + r.name.to_uri());
  if (contains(r.name))
    return;
  if (!name_matches_content(r))
    throw std::invalid_argument("genesis digest mismatch: " + r.name.to_uri());
  const Certificate* root = trust_.find_root(r.content.signer_key);
  if (!root || root->subject != r.generator())
    throw std::invalid_argument("genesis record not signed by a trusted root");
  if (!verify_poa(r, *scheme_, root->public_key))
    throw std::invalid_argument("genesis PoA does not verify");
  auto body = decode_genesis(r.content.payload.body);

  auto slot = allocate_slot();
  Node& n = nodes_[slot];
  n = Node{};
  n.record = std::move(record);
  n.generator = entity_index(n.record->generator());
  n.seq = next_seq_++;
  n.arrival = now;
  n.confirmed_at = now;
  n.confirmed = true;
  n.genesis = true;
  n.live = true;
  const auto& name = n.record->name;
  index_.emplace(name, slot);
  admission_log_.push_back(name);
  add_tailing(slot);
  if (body.certificate) {
    entity_index(body.certificate->subject);
    certificates_by_subject_[body.certificate->subject].push_back(name);
  }
}

AdmitOutcome LedgerState::admit(std::shared_ptr<const Record> record, Arrival arrival, double now,
                                AdmitOptions options)
{
  AdmitOutcome out;
  std::vector<WorkItem> worklist;
  out.verdict = admit_one({std::move(record), arrival, options}, now, out.confirmed, worklist);
  for (std::size_t i = 0; i < worklist.size(); ++i) {
    auto item = std::move(worklist[i]);
    admit_one(item, now, out.confirmed, worklist);
  }
  return out;
}

ValidationVerdict LedgerState::admit_one(const WorkItem& item, double now,
                                         std::vector<RecordName>& fired,
                                         std::vector<WorkItem>& worklist)
{
  const auto& name = item.record->name;
  if (auto d = deferred_.find(name); d != deferred_.end()) {
    if (item.arrival == Arrival::Tailing)
      return ValidationVerdict::rejected(RejectReason::ContributionViolation);
    deferred_.erase(d);
  }

  auto verdict = evaluate(item, now, fired, worklist);
  if (verdict.is_accepted()) {
    insert(item.record, now, fired);
    if (observer_)
      observer_->on_accepted(*item.record, now);
    release_waiters(name, worklist);
  }
  else if (verdict.is_pending()) {
    park(item, verdict.missing, now);
    if (observer_)
      observer_->on_pending(name, verdict.missing);
  }
  else if (verdict.reason != RejectReason::DuplicateName) {
    if (verdict.reason == RejectReason::ContributionViolation) {
      while (deferred_.size() >= config_.deferred_cap && !deferred_order_.empty()) {
        deferred_.erase(deferred_order_.front());
        deferred_order_.pop_front();
      }
      if (deferred_.emplace(name, item.record).second)
        deferred_order_.push_back(name);
      if (deferred_order_.size() > 4 * config_.deferred_cap) {
        std::erase_if(deferred_order_, [&](const RecordName& n) { return !deferred_.contains(n); });
      }
    }
    reject(name, verdict.reason, now);
  }
  return verdict;
}

ValidationVerdict LedgerState::evaluate(const WorkItem& item, double now,
                                        std::vector<RecordName>& fired,
                                        std::vector<WorkItem>& worklist)
{
  using V = ValidationVerdict;
  const Record& r = *item.record;
  const auto& approved = r.approved();

  if (contains(r.name) || is_archived(r.name))
    return V::rejected(RejectReason::DuplicateName);
  if (auto it = rejected_.find(r.name); it != rejected_.end())
    return V::rejected(it->second);
  if (!name_matches_content(r))
    return V::rejected(RejectReason::DigestMismatch);

  if (r.kind() == PayloadKind::Genesis || approved.size() != config_.approvals_per_record)
    return V::rejected(RejectReason::Malformed);
  for (std::size_t i = 0; i < approved.size(); ++i)
    for (std::size_t j = i + 1; j < approved.size(); ++j)
      if (approved[i] == approved[j])
        return V::rejected(RejectReason::Malformed);
  std::optional<Certificate> issued;
  try {
    if (r.kind() == PayloadKind::CertIssuance)
      issued = decode_certificate(r.content.payload.body);
    else if (r.kind() == PayloadKind::CertRevocation)
      decode_revocation(r.content.payload.body);
  }
  catch (const DecodeError&) {
    return V::rejected(RejectReason::Malformed);
  }

  for (const auto& a : approved)
    if (a.generator == r.generator())
      return V::rejected(RejectReason::SelfApproval);
  for (const auto& a : approved)
    if (rejected_.contains(a))
      return V::rejected(RejectReason::InvalidAncestor);

  for (const auto& a : approved) {
    auto d = deferred_.find(a);
    if (d == deferred_.end())
      continue;
    auto ancestor = d->second;
    admit_one({std::move(ancestor), Arrival::Backfill, {}}, now, fired, worklist);
  }

  std::vector<RecordName> missing;
  for (const auto& a : approved)
    if (!contains(a) && !is_archived(a))
      missing.push_back(a);
  const auto& signer = r.content.signer_key;
  if (!trust_.is_root(signer) && !contains(signer) && !is_archived(signer) &&
      std::find(missing.begin(), missing.end(), signer) == missing.end())
    missing.push_back(signer);
  if (!missing.empty())
    return V::pending(std::move(missing));

  auto resolved = resolve_signer(signer, now);
  if (!resolved) {
    switch (resolved.error) {
    case ResolveError::NotConfirmed: return V::rejected(RejectReason::CertNotConfirmed);
    case ResolveError::Revoked: return V::rejected(RejectReason::CertRevoked);
    default: return V::rejected(RejectReason::PoAInvalid);
    }
  }
  if (resolved.certificate->subject != r.generator())
    return V::rejected(RejectReason::PoAInvalid);
  if (r.kind() == PayloadKind::CertIssuance || r.kind() == PayloadKind::CertRevocation) {
    if (!trust_.is_root(signer))
      return V::rejected(RejectReason::PoAInvalid);
    if (issued && issued->issuer != r.generator())
      return V::rejected(RejectReason::Malformed);
  }
  if (!item.options.poa_preverified && !verify_poa(r, *scheme_, resolved.certificate->public_key))
    return V::rejected(RejectReason::PoAInvalid);
  honored_.insert(signer);

  if (config_.enforce_contribution && item.arrival == Arrival::Tailing && !waiting_.contains(r.name)) {
    for (const auto& a : approved) {
      auto slot = slot_of(a);
      if (slot == kNoSlot)
        return V::rejected(RejectReason::ContributionViolation); // archived, hence confirmed
      const Node& p = nodes_[slot];
      if (!p.genesis && effective_weight(p) >= config_.w_contribution)
        return V::rejected(RejectReason::ContributionViolation);
    }
  }

  if (r.kind() == PayloadKind::Application && validator_ && !validator_(r))
    return V::rejected(RejectReason::AppRejected);
  return V::accepted();
}

void LedgerState::insert(std::shared_ptr<const Record> record, double now,
                         std::vector<RecordName>& fired)
{
  auto slot = allocate_slot();
  {
    Node& n = nodes_[slot];
    n = Node{};
    n.record = std::move(record);
    n.generator = entity_index(n.record->generator());
    n.seq = next_seq_++;
    n.arrival = now;
    n.live = true;
    n.parents.reserve(n.record->approved().size());
    for (const auto& a : n.record->approved())
      n.parents.push_back(slot_of(a));
  }
  Node& n = nodes_[slot];
  const auto& name = n.record->name;
  index_.emplace(name, slot);
  admission_log_.push_back(name);
  unconfirmed_.emplace(n.seq, slot);
  for (auto p : n.parents) {
    if (p == kNoSlot)
      continue;
    nodes_[p].children.push_back(slot);
    if (nodes_[p].tailing_pos != kNoSlot)
      remove_tailing(p);
  }
  add_tailing(slot);

  if (n.record->kind() == PayloadKind::CertIssuance) {
    auto cert = decode_certificate(n.record->content.payload.body);
    entity_index(cert.subject);
    certificates_by_subject_[cert.subject].push_back(name);
  }

  // Every ancestor already holding e has all of its own ancestors holding e
  // too, so the walk stops there.
  auto e = n.generator;
  std::vector<std::uint32_t> stack;
  for (auto p : n.parents)
    if (p != kNoSlot)
      stack.push_back(p);
  while (!stack.empty()) {
    auto x = stack.back();
    stack.pop_back();
    Node& a = nodes_[x];
    if (a.genesis || !a.approvers.insert(e))
      continue;
    if (!a.confirmed && effective_weight(a) >= config_.w_confirm)
      confirm(x, now, fired);
    for (auto p : a.parents)
      if (p != kNoSlot)
        stack.push_back(p);
  }
}

void LedgerState::confirm(std::uint32_t slot, double now, std::vector<RecordName>& fired)
{
  Node& n = nodes_[slot];
  n.confirmed = true;
  n.confirmed_at = now;
  unconfirmed_.erase(n.seq);
  fired.push_back(n.record->name);
  if (n.record->kind() == PayloadKind::CertRevocation)
    on_revocation_confirmed(n.record->name);
  if (observer_)
    observer_->on_confirmed(*n.record, now);
}

void LedgerState::on_revocation_confirmed(const RecordName& name)
{
  ++confirmed_revocations_;
  trust_.invalidate_cache();
  if (!revocation_head_) {
    revocation_head_ = name;
    return;
  }
  // Adopt the new record as head when its back-pointer chain reaches the old head.
  std::optional<RecordName> cur = name;
  for (std::size_t guard = 0; cur && guard <= confirmed_revocations_ + 1; ++guard) {
    if (*cur == *revocation_head_) {
      revocation_head_ = name;
      return;
    }
    auto rec = find(*cur);
    if (!rec)
      return;
    cur = rec->content.payload.prev_revocation;
  }
}

void LedgerState::reject(const RecordName& name, RejectReason reason, double now)
{
  if (observer_)
    observer_->on_rejected(name, reason, now);
  if (is_transient(reason))
    return;
  rejected_[name] = reason;

  std::vector<RecordName> cascade{name};
  while (!cascade.empty()) {
    auto cur = std::move(cascade.back());
    cascade.pop_back();
    auto it = waiting_.find(cur);
    if (it == waiting_.end())
      continue;
    auto waiters = std::move(it->second);
    waiting_.erase(it);
    for (auto& w : waiters) {
      if (pending_.erase(w) == 0)
        continue;
      rejected_[w] = RejectReason::InvalidAncestor;
      if (observer_)
        observer_->on_rejected(w, RejectReason::InvalidAncestor, now);
      cascade.push_back(std::move(w));
    }
  }
}

void LedgerState::park(const WorkItem& item, std::vector<RecordName> missing, double now)
{
  const auto& name = item.record->name;
  if (pending_.contains(name))
    return;
  while (pending_.size() >= config_.pending_cap && !pending_order_.empty()) {
    auto oldest = std::move(pending_order_.front());
    pending_order_.pop_front();
    pending_.erase(oldest);
  }
  Parked p{item.record, item.arrival, item.options, {}, now};
  for (auto& m : missing) {
    waiting_[m].push_back(name);
    p.missing.insert(std::move(m));
  }
  pending_.emplace(name, std::move(p));
  pending_order_.push_back(name);
  if (pending_order_.size() > 4 * config_.pending_cap)
    std::erase_if(pending_order_, [&](const RecordName& n) { return !pending_.contains(n); });
}

void LedgerState::release_waiters(const RecordName& name, std::vector<WorkItem>& worklist)
{
  auto it = waiting_.find(name);
  if (it == waiting_.end())
    return;
  auto waiters = std::move(it->second);
  waiting_.erase(it);
  for (const auto& w : waiters) {
    auto pit = pending_.find(w);
    if (pit == pending_.end())
      continue;
    pit->second.missing.erase(name);
    if (!pit->second.missing.empty())
      continue;
    worklist.push_back({pit->second.record, pit->second.arrival, pit->second.options});
    pending_.erase(pit);
  }
}

// --- queries -------------------------------------------------------------------

bool LedgerState::is_archived(const RecordName& name) const
{
  return archive_ && archive_->contains(name);
}

std::optional<RejectReason> LedgerState::rejection(const RecordName& name) const
{
  auto it = rejected_.find(name);
  if (it == rejected_.end())
    return std::nullopt;
  return it->second;
}

bool LedgerState::knows(const RecordName& name) const
{
  return contains(name) || is_pending(name) || is_deferred(name) || was_pruned(name) ||
         rejected_.contains(name) || is_archived(name);
}

std::shared_ptr<const Record> LedgerState::find(const RecordName& name) const
{
  if (auto slot = slot_of(name); slot != kNoSlot)
    return nodes_[slot].record;
  return archive_ ? archive_->find(name) : nullptr;
}

std::shared_ptr<const Record> LedgerState::find_any(const RecordName& name) const
{
  if (auto r = find(name))
    return r;
  if (auto it = pending_.find(name); it != pending_.end())
    return it->second.record;
  if (auto it = deferred_.find(name); it != deferred_.end())
    return it->second;
  return nullptr;
}

std::uint32_t LedgerState::weight(const RecordName& name) const
{
  return effective_weight(node(name));
}

bool LedgerState::is_confirmed(const RecordName& name) const
{
  if (auto slot = slot_of(name); slot != kNoSlot)
    return nodes_[slot].confirmed;
  return is_archived(name);
}

std::optional<double> LedgerState::confirmed_at(const RecordName& name) const
{
  auto slot = slot_of(name);
  if (slot == kNoSlot || !nodes_[slot].confirmed)
    return std::nullopt;
  return nodes_[slot].confirmed_at;
}

bool LedgerState::is_genesis(const RecordName& name) const
{
  auto slot = slot_of(name);
  return slot != kNoSlot && nodes_[slot].genesis;
}

std::vector<EntityId> LedgerState::approvers(const RecordName& name) const
{
  const Node& n = node(name);
  std::vector<EntityId> out;
  for (std::uint32_t i = 0; i < entity_names_.size(); ++i)
    if (n.approvers.test(i))
      out.push_back(entity_names_[i]);
  return out;
}

std::vector<RecordName> LedgerState::children(const RecordName& name) const
{
  std::vector<RecordName> out;
  for (auto c : node(name).children)
    out.push_back(nodes_[c].record->name);
  return out;
}

std::optional<double> LedgerState::arrival_time(const RecordName& name) const
{
  auto it = index_.find(name);
  if (it == index_.end())
    return std::nullopt;
  return nodes_[it->second].arrival;
}

std::vector<RecordName> LedgerState::tailing() const
{
  std::vector<RecordName> out;
  out.reserve(tailing_.size());
  for (auto s : tailing_)
    out.push_back(nodes_[s].record->name);
  return out;
}

bool LedgerState::is_tailing(const RecordName& name) const
{
  auto slot = slot_of(name);
  return slot != kNoSlot && nodes_[slot].tailing_pos != kNoSlot;
}

std::size_t LedgerState::max_unconfirmed_depth() const
{
  std::unordered_map<std::uint32_t, std::size_t> depth;
  depth.reserve(unconfirmed_.size());
  std::size_t best = 0;
  for (auto [seq, slot] : unconfirmed_) {
    std::size_t d = 1;
    for (auto p : nodes_[slot].parents) {
      if (p == kNoSlot)
        continue;
      if (auto it = depth.find(p); it != depth.end())
        d = std::max(d, it->second + 1);
    }
    depth.emplace(slot, d);
    best = std::max(best, d);
  }
  return best;
}

std::vector<std::shared_ptr<const Record>> LedgerState::records_in_order() const
{
  std::vector<std::shared_ptr<const Record>> out;
  out.reserve(index_.size());
  for (const auto& name : admission_log_)
    if (auto slot = slot_of(name); slot != kNoSlot)
      out.push_back(nodes_[slot].record);
  return out;
}

std::vector<std::shared_ptr<const Record>> LedgerState::history() const
{
  std::vector<std::shared_ptr<const Record>> out;
  for (const auto& name : admission_log_)
    if (auto r = find(name))
      out.push_back(std::move(r));
  return out;
}

std::vector<RecordName> LedgerState::unconfirmed() const
{
  std::vector<RecordName> out;
  for (auto [seq, slot] : unconfirmed_)
    out.push_back(nodes_[slot].record->name);
  return out;
}

std::vector<RecordName> LedgerState::confirmed_names() const
{
  std::vector<RecordName> out;
  for (const auto& name : admission_log_)
    if (auto slot = slot_of(name); slot != kNoSlot && nodes_[slot].confirmed)
      out.push_back(name);
  return out;
}

std::vector<RecordName> LedgerState::foreign_tailing(const EntityId& self) const
{
  std::vector<RecordName> out;
  for (auto s : tailing_)
    if (nodes_[s].record->generator() != self)
      out.push_back(nodes_[s].record->name);
  return out;
}

std::vector<RecordName> LedgerState::fallback_candidates(const EntityId& self) const
{
  constexpr std::size_t kMaxFallback = 64;
  std::vector<RecordName> out;
  for (auto it = unconfirmed_.rbegin(); it != unconfirmed_.rend() && out.size() < kMaxFallback;
       ++it) {
    const Node& n = nodes_[it->second];
    if (n.tailing_pos != kNoSlot || n.record->generator() == self)
      continue;
    if (effective_weight(n) < config_.w_contribution)
      out.push_back(n.record->name);
  }
  return out;
}

bool LedgerState::approvable(const RecordName& name) const
{
  if (rejected_.contains(name))
    return false;
  if (confirmed_revocations_ == 0)
    return true;
  auto slot = slot_of(name);
  if (slot == kNoSlot)
    return true;
  const auto& signer = nodes_[slot].record->content.signer_key;
  return trust_.is_root(signer) ||
         revocation_status(signer).state != RevocationStatus::State::Revoked;
}

// --- identity -----------------------------------------------------------------------

RevocationStatus LedgerState::revocation_status(const RecordName& cert) const
{
  RevocationStatus status;
  if (!contains(cert) && !is_archived(cert))
    return status;
  status.state = RevocationStatus::State::Valid;
  auto cur = revocation_head_;
  for (std::size_t guard = 0; cur && guard <= index_.size(); ++guard) {
    auto rec = find(*cur);
    if (!rec)
      break;
    if (is_confirmed(*cur)) {
      auto notice = decode_revocation(rec->content.payload.body);
      if (notice.revoked_cert == cert) {
        status.state = RevocationStatus::State::Revoked;
        status.revoked_at = *cur;
        return status;
      }
    }
    cur = rec->content.payload.prev_revocation;
  }
  return status;
}

SignerResolution LedgerState::resolve_signer(const KeyLocator& locator, double now)
{
  return dledger::resolve_signer(trust_, *this, locator, now);
}

std::optional<RecordName> LedgerState::active_certificate(const EntityId& subject) const
{
  auto it = certificates_by_subject_.find(subject);
  if (it == certificates_by_subject_.end())
    return std::nullopt;
  for (auto c = it->second.rbegin(); c != it->second.rend(); ++c)
    if (is_confirmed(*c) && revocation_status(*c).state != RevocationStatus::State::Revoked)
      return *c;
  return std::nullopt;
}

// --- maintenance -------------------------------------------------------------------

void LedgerState::remove_node(std::uint32_t slot, bool restore_tailing)
{
  Node& n = nodes_[slot];
  for (auto p : n.parents) {
    if (p == kNoSlot)
      continue;
    auto& siblings = nodes_[p].children;
    std::erase(siblings, slot);
    if (restore_tailing && siblings.empty() && nodes_[p].tailing_pos == kNoSlot)
      add_tailing(p);
  }
  for (auto c : n.children)
    for (auto& p : nodes_[c].parents)
      if (p == slot)
        p = kNoSlot;
  if (n.tailing_pos != kNoSlot)
    remove_tailing(slot);
  if (!n.confirmed && !n.genesis)
    unconfirmed_.erase(n.seq);
  index_.erase(n.record->name);
  n = Node{};
  free_slots_.push_back(slot);
}

void LedgerState::recompute_approvers(const std::vector<std::uint32_t>& slots)
{
  auto order = slots;
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return nodes_[a].seq > nodes_[b].seq; });
  for (auto x : order) {
    EntitySet fresh;
    for (auto c : nodes_[x].children) {
      fresh.insert(nodes_[c].generator);
      fresh.merge(nodes_[c].approvers);
    }
    nodes_[x].approvers = std::move(fresh);
  }
}

ArchiveReport LedgerState::prune_and_archive(double now)
{
  ArchiveReport report;

  if (std::isfinite(config_.unconfirmed_ttl)) {
    double cutoff = now - config_.unconfirmed_ttl;
    std::unordered_set<std::uint32_t> doomed;
    std::vector<std::uint32_t> doomed_order;
    for (auto [seq, slot] : unconfirmed_) {
      if (nodes_[slot].arrival > cutoff)
        continue;
      if (doomed.contains(slot))
        continue;
      // The record goes together with its descendants, which must all be unconfirmed.
      std::vector<std::uint32_t> closure{slot};
      std::unordered_set<std::uint32_t> seen{slot};
      bool ok = true;
      for (std::size_t i = 0; i < closure.size() && ok; ++i) {
        for (auto c : nodes_[closure[i]].children) {
          if (nodes_[c].confirmed) {
            ok = false;
            break;
          }
          if (seen.insert(c).second)
            closure.push_back(c);
        }
      }
      if (!ok)
        continue;
      for (auto s : closure)
        if (doomed.insert(s).second)
          doomed_order.push_back(s);
    }

    if (!doomed.empty()) {
      std::vector<std::uint32_t> affected;
      std::unordered_set<std::uint32_t> seen;
      std::vector<std::uint32_t> stack;
      for (auto s : doomed_order)
        for (auto p : nodes_[s].parents)
          if (p != kNoSlot && !doomed.contains(p) && seen.insert(p).second)
            stack.push_back(p);
      while (!stack.empty()) {
        auto x = stack.back();
        stack.pop_back();
        if (nodes_[x].genesis)
          continue;
        affected.push_back(x);
        for (auto p : nodes_[x].parents)
          if (p != kNoSlot && seen.insert(p).second)
            stack.push_back(p);
      }
      std::sort(doomed_order.begin(), doomed_order.end(),
                [&](auto a, auto b) { return nodes_[a].seq < nodes_[b].seq; });
      for (auto s : doomed_order) {
        auto name = nodes_[s].record->name;
        remove_node(s, true);
        pruned_.insert(name);
        report.pruned.push_back(std::move(name));
      }
      recompute_approvers(affected);
    }

    for (auto it = pending_.begin(); it != pending_.end();) {
      if (it->second.since <= cutoff) {
        it = pending_.erase(it);
        ++report.expired_pending;
      }
      else {
        ++it;
      }
    }
  }

  if (config_.archive_depth) {
    constexpr auto kFar = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> dist(nodes_.size(), kFar);
    std::deque<std::uint32_t> queue;
    for (auto t : tailing_) {
      dist[t] = 0;
      queue.push_back(t);
    }
    while (!queue.empty()) {
      auto x = queue.front();
      queue.pop_front();
      for (auto p : nodes_[x].parents)
        if (p != kNoSlot && dist[p] == kFar) {
          dist[p] = dist[x] + 1;
          queue.push_back(p);
        }
    }
    // Descendants of records still awaiting confirmation stay, so a later
    // prune can recompute their ancestors' approver sets.
    std::vector<char> keep(nodes_.size(), 0);
    std::vector<std::uint32_t> stack;
    for (auto [seq, slot] : unconfirmed_) {
      keep[slot] = 1;
      stack.push_back(slot);
    }
    while (!stack.empty()) {
      auto x = stack.back();
      stack.pop_back();
      for (auto c : nodes_[x].children)
        if (!keep[c]) {
          keep[c] = 1;
          stack.push_back(c);
        }
    }
    std::vector<std::uint32_t> victims;
    for (std::uint32_t s = 0; s < nodes_.size(); ++s) {
      const Node& n = nodes_[s];
      if (n.live && n.confirmed && !keep[s] && (dist[s] == kFar || dist[s] > *config_.archive_depth))
        victims.push_back(s);
    }
    std::sort(victims.begin(), victims.end(),
              [&](auto a, auto b) { return nodes_[a].seq < nodes_[b].seq; });
    if (!victims.empty() && !archive_)
      archive_ = std::make_shared<MemoryArchive>();
    for (auto s : victims) {
      archive_->store(nodes_[s].record);
      report.archived.push_back(nodes_[s].record->name);
      remove_node(s, false);
    }
  }
  return report;
}

std::vector<RecordName> confirmations_fired(const LedgerState& before,
                                            std::shared_ptr<const Record> record, Arrival arrival,
                                            double now)
{
  LedgerState copy = before;
  copy.set_observer(nullptr);
  return copy.admit(std::move(record), arrival, now).confirmed;
}

} // namespace dledger
