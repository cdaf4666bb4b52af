#pragma once

#include "dledger/ledger/record_builder.hpp"

#include <map>
#include <memory>
#include <random>
#include <stdexcept>

namespace dledger {

class DuplicateSubject : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class UnknownCert : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// The identity manager: owns a self-issued root and issues or revokes
/// entity certificates by publishing records.
class IdentityManager
{
public:
  IdentityManager(EntityId id, std::shared_ptr<const SignatureScheme> scheme, std::mt19937_64& rng);

  const EntityId& id() const { return root_.subject; }
  const Certificate& root_certificate() const { return root_; }
  KeyLocator root_key_locator() const { return root_locator(root_); }
  SigningIdentity signing_identity() const;

  /// Certificate for `subject`, valid from `now` on.
  Certificate make_certificate(const EntityId& subject, Bytes public_key, double now) const;

  /// One genesis record per certificate, each carrying it. Every peer injects
  /// the whole set at start-up.
  std::vector<std::shared_ptr<const Record>> make_genesis(const std::vector<Certificate>& certs);

  /// CertIssuance record approving records chosen like any peer would.
  /// Throws DuplicateSubject when `subject` already holds an unrevoked certificate.
  Record issue_certificate(const LedgerState& ledger, const EntityId& subject, Bytes public_key,
                           double now, std::mt19937_64& rng);

  /// CertRevocation record chained to the previous revocation.
  /// Throws UnknownCert unless `cert` names a confirmed certificate record.
  Record revoke_certificate(const LedgerState& ledger, const RecordName& cert, std::string reason,
                            std::mt19937_64& rng);

  const std::optional<RecordName>& last_revocation() const { return last_revocation_; }

private:
  std::shared_ptr<const SignatureScheme> scheme_;
  Certificate root_;
  Bytes private_key_;
  std::map<EntityId, RecordName> issued_;
  std::optional<RecordName> last_revocation_;
};

} // namespace dledger
