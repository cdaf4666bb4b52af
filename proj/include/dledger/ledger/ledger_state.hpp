#pragma once

#include "dledger/identity/trust_store.hpp"
#include "dledger/ledger/archive.hpp"
#include "dledger/ledger/entity_set.hpp"
#include "dledger/record/encoding.hpp"

#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace dledger {

struct LedgerConfig
{
  std::size_t approvals_per_record = 2;
  std::uint32_t w_confirm = 20;
  std::uint32_t w_contribution = 5;
  bool count_self_indirect = false;
  // Off only for adversary models that ignore the policy.
  bool enforce_contribution = true;
  double unconfirmed_ttl = std::numeric_limits<double>::infinity();
  std::optional<std::size_t> archive_depth;
  std::size_t pending_cap = 512;
  std::size_t deferred_cap = 4096;
  std::size_t max_payload = kDefaultMaxPayload;

  /// w_contribution = max(1, w_confirm / 4).
  static LedgerConfig with_defaults(std::size_t n, std::uint32_t w_confirm);

  /// Throws std::invalid_argument unless n >= 2 and 0 < w_contribution < w_confirm.
  void validate() const;
};

enum class RejectReason
{
  PoAInvalid,
  CertNotConfirmed,
  CertRevoked,
  SelfApproval,
  ContributionViolation,
  AppRejected,
  DuplicateName,
  DigestMismatch,
  Malformed,
  InvalidAncestor,
};

std::string to_string(RejectReason reason);

/// Rejections that are not remembered: the record may be admitted later.
bool is_transient(RejectReason reason);

struct ValidationVerdict
{
  enum class Outcome
  {
    Accepted,
    Rejected,
    Pending,
  };

  Outcome outcome = Outcome::Accepted;
  RejectReason reason = RejectReason::Malformed;
  std::vector<RecordName> missing;

  static ValidationVerdict accepted() { return {}; }
  static ValidationVerdict rejected(RejectReason r) { return {Outcome::Rejected, r, {}}; }
  static ValidationVerdict pending(std::vector<RecordName> m)
  {
    return {Outcome::Pending, RejectReason::Malformed, std::move(m)};
  }

  bool is_accepted() const { return outcome == Outcome::Accepted; }
  bool is_rejected() const { return outcome == Outcome::Rejected; }
  bool is_pending() const { return outcome == Outcome::Pending; }
};

/// How a record reached this ledger. Only tailing arrivals (notifications and
/// locally created records) are subject to the contribution policy.
enum class Arrival
{
  Tailing,
  Backfill,
};

struct AdmitOptions
{
  // The PoA was already checked against the notification that announced it.
  bool poa_preverified = false;
};

struct AdmitOutcome
{
  ValidationVerdict verdict;
  // Records whose weight crossed w_confirm during this call, in firing order.
  std::vector<RecordName> confirmed;
};

class UnknownRecord : public std::out_of_range
{
public:
  explicit UnknownRecord(const RecordName& name)
    : std::out_of_range("unknown record " + name.to_uri())
  {
  }
};

struct RevocationStatus
{
  enum class State
  {
    Valid,
    Revoked,
    Unknown,
  };
  State state = State::Unknown;
  std::optional<RecordName> revoked_at;
};

struct ArchiveReport
{
  std::vector<RecordName> pruned;
  std::vector<RecordName> archived;
  std::size_t expired_pending = 0;

  bool empty() const { return pruned.empty() && archived.empty() && expired_pending == 0; }
};

/// Receives ledger events; every callback defaults to a no-op.
class LedgerObserver
{
public:
  virtual ~LedgerObserver() = default;
  virtual void on_accepted(const Record&, double /*now*/) {}
  virtual void on_confirmed(const Record&, double /*now*/) {}
  virtual void on_rejected(const RecordName&, RejectReason, double /*now*/) {}
  virtual void on_pending(const RecordName&, const std::vector<RecordName>& /*missing*/) {}
};

using AppValidator = std::function<bool(const Record&)>;

/// Per-peer DAG store.
///
/// Single writer: every mutation happens on the owning peer's strand. Records
/// are shared immutable values, so copies of a LedgerState are cheap snapshots.
class LedgerState
{
public:
  LedgerState(LedgerConfig config, TrustStore trust,
              std::shared_ptr<const SignatureScheme> scheme, AppValidator validator = {});

  const LedgerConfig& config() const { return config_; }
  const SignatureScheme& scheme() const { return *scheme_; }
  std::shared_ptr<const SignatureScheme> scheme_ptr() const { return scheme_; }
  TrustStore& trust() { return trust_; }
  const TrustStore& trust() const { return trust_; }

  void set_observer(LedgerObserver* observer) { observer_ = observer; }
  void set_archive(std::shared_ptr<ArchiveSink> sink) { archive_ = std::move(sink); }
  const ArchiveSink* archive() const { return archive_.get(); }
  void set_app_validator(AppValidator validator) { validator_ = std::move(validator); }

  /// Installs a bootstrap record as confirmed and approved by every entity.
  /// Throws std::invalid_argument unless it is a Genesis record signed by a trusted root.
  void inject_genesis(std::shared_ptr<const Record> record, double now = 0.0);

  AdmitOutcome admit(std::shared_ptr<const Record> record, Arrival arrival, double now,
                     AdmitOptions options = {});

  // --- queries -----------------------------------------------------------

  bool contains(const RecordName& name) const { return index_.contains(name); }
  bool is_archived(const RecordName& name) const;
  bool is_pending(const RecordName& name) const { return pending_.contains(name); }
  bool is_deferred(const RecordName& name) const { return deferred_.contains(name); }
  bool was_pruned(const RecordName& name) const { return pruned_.contains(name); }
  std::optional<RejectReason> rejection(const RecordName& name) const;

  /// Stored, archived, parked, deferred, pruned or permanently rejected.
  bool knows(const RecordName& name) const;

  /// Stored or archived record.
  std::shared_ptr<const Record> find(const RecordName& name) const;
  /// Includes parked and deferred records, for serving to other peers.
  std::shared_ptr<const Record> find_any(const RecordName& name) const;

  std::uint32_t weight(const RecordName& name) const;
  bool is_confirmed(const RecordName& name) const;
  std::optional<double> confirmed_at(const RecordName& name) const;
  bool is_genesis(const RecordName& name) const;

  /// Distinct generators of stored records reverse-reachable from `name`.
  std::vector<EntityId> approvers(const RecordName& name) const;

  /// Stored records approving `name` directly.
  std::vector<RecordName> children(const RecordName& name) const;

  std::vector<RecordName> tailing() const;
  std::size_t tailing_count() const { return tailing_.size(); }
  bool is_tailing(const RecordName& name) const;
  /// Changes whenever the tailing set does.
  std::uint64_t tailing_version() const { return tailing_version_; }

  /// When a stored record was admitted here.
  std::optional<double> arrival_time(const RecordName& name) const;

  std::size_t size() const { return index_.size(); }
  std::size_t unconfirmed_count() const { return unconfirmed_.size(); }
  std::size_t pending_count() const { return pending_.size(); }
  std::size_t deferred_count() const { return deferred_.size(); }

  /// Longest approval chain made only of unconfirmed records (in records).
  std::size_t max_unconfirmed_depth() const;

  /// Stored records in admission order.
  std::vector<std::shared_ptr<const Record>> records_in_order() const;
  /// Every record ever admitted (stored or archived), in admission order.
  std::vector<std::shared_ptr<const Record>> history() const;

  std::vector<RecordName> unconfirmed() const;
  std::vector<RecordName> confirmed_names() const;

  // --- record creation support -------------------------------------------

  /// Tailing records generated by someone other than `self`.
  std::vector<RecordName> foreign_tailing(const EntityId& self) const;

  /// Non-tailing unconfirmed records of other generators with weight below
  /// w_contribution, most recent first.
  std::vector<RecordName> fallback_candidates(const EntityId& self) const;

  /// False when `name` is signed by a revoked key or was rejected here.
  /// Ancestors already passed admission, so they are not rechecked.
  bool approvable(const RecordName& name) const;

  // --- identity ------------------------------------------------------------

  RevocationStatus revocation_status(const RecordName& cert) const;

  SignerResolution resolve_signer(const KeyLocator& locator, double now);

  /// Confirmed, unrevoked certificate record for `subject`, if any.
  std::optional<RecordName> active_certificate(const EntityId& subject) const;

  /// Latest confirmed revocation record.
  const std::optional<RecordName>& revocation_head() const { return revocation_head_; }

  /// Certificates this ledger has honored for signature checks.
  const std::set<KeyLocator>& honored_certificates() const { return honored_; }

  // --- maintenance ---------------------------------------------------------

  ArchiveReport prune_and_archive(double now);

private:
  static constexpr std::uint32_t kNoSlot = std::numeric_limits<std::uint32_t>::max();

  struct Node
  {
    std::shared_ptr<const Record> record;
    EntitySet approvers;
    std::vector<std::uint32_t> parents; // kNoSlot for archived approvals
    std::vector<std::uint32_t> children;
    std::uint32_t generator = 0;
    std::uint32_t weight = 0;
    std::uint32_t tailing_pos = kNoSlot;
    std::uint64_t seq = 0;
    double arrival = 0.0;
    double confirmed_at = 0.0;
    bool confirmed = false;
    bool genesis = false;
    bool live = false;
  };

  struct Parked
  {
    std::shared_ptr<const Record> record;
    Arrival arrival;
    AdmitOptions options;
    std::set<RecordName> missing;
    double since;
  };

  struct WorkItem
  {
    std::shared_ptr<const Record> record;
    Arrival arrival;
    AdmitOptions options;
  };

  std::uint32_t entity_index(const EntityId& id);
  std::uint32_t slot_of(const RecordName& name) const;
  const Node& node(const RecordName& name) const;

  ValidationVerdict evaluate(const WorkItem& item, double now, std::vector<RecordName>& fired,
                             std::vector<WorkItem>& worklist);
  ValidationVerdict admit_one(const WorkItem& item, double now, std::vector<RecordName>& fired,
                              std::vector<WorkItem>& worklist);
  void insert(std::shared_ptr<const Record> record, double now, std::vector<RecordName>& fired);
  void confirm(std::uint32_t slot, double now, std::vector<RecordName>& fired);
  void on_revocation_confirmed(const RecordName& name);
  void reject(const RecordName& name, RejectReason reason, double now);
  void park(const WorkItem& item, std::vector<RecordName> missing, double now);
  void release_waiters(const RecordName& name, std::vector<WorkItem>& worklist);
  void add_tailing(std::uint32_t slot);
  void remove_tailing(std::uint32_t slot);
  void remove_node(std::uint32_t slot, bool restore_tailing);
  std::uint32_t allocate_slot();
  void recompute_approvers(const std::vector<std::uint32_t>& slots);
  std::uint32_t effective_weight(const Node& n) const;

  LedgerConfig config_;
  TrustStore trust_;
  std::shared_ptr<const SignatureScheme> scheme_;
  AppValidator validator_;
  LedgerObserver* observer_ = nullptr;
  std::shared_ptr<ArchiveSink> archive_;

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> free_slots_;
  std::unordered_map<RecordName, std::uint32_t, RecordNameHash> index_;
  std::unordered_map<EntityId, std::uint32_t> entities_;
  std::vector<EntityId> entity_names_;
  std::vector<std::uint32_t> tailing_;
  std::uint64_t tailing_version_ = 0;
  std::map<std::uint64_t, std::uint32_t> unconfirmed_; // seq -> slot
  std::uint64_t next_seq_ = 0;
  std::vector<RecordName> admission_log_;

  std::unordered_map<RecordName, Parked, RecordNameHash> pending_;
  std::deque<RecordName> pending_order_;
  std::unordered_map<RecordName, std::vector<RecordName>, RecordNameHash> waiting_;

  std::unordered_map<RecordName, std::shared_ptr<const Record>, RecordNameHash> deferred_;
  std::deque<RecordName> deferred_order_;

  std::unordered_map<RecordName, RejectReason, RecordNameHash> rejected_;
  std::unordered_set<RecordName, RecordNameHash> pruned_;

  std::map<EntityId, std::vector<RecordName>> certificates_by_subject_;
  std::optional<RecordName> revocation_head_;
  std::size_t confirmed_revocations_ = 0;
  std::set<KeyLocator> honored_;
};

/// Oracle-friendly helper: the set of records whose weight crosses w_confirm
/// when `record` is admitted to a copy of `before`.
std::vector<RecordName> confirmations_fired(const LedgerState& before,
                                            std::shared_ptr<const Record> record, Arrival arrival,
                                            double now);

} // namespace dledger
