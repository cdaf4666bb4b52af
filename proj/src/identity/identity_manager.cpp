#include "dledger/identity/identity_manager.hpp"

namespace dledger {

IdentityManager::IdentityManager(EntityId id, std::shared_ptr<const SignatureScheme> scheme,
                                 std::mt19937_64& rng)
  : scheme_(std::move(scheme))
{
  auto keys = scheme_->generate_key(rng);
  root_ = Certificate{id, std::move(keys.public_key), id, 0.0,
                      std::numeric_limits<double>::infinity()};
  private_key_ = std::move(keys.private_key);
}

SigningIdentity IdentityManager::signing_identity() const
{
  return {root_.subject, root_key_locator(), private_key_};
}

Certificate IdentityManager::make_certificate(const EntityId& subject, Bytes public_key,
                                              double now) const
{
  return Certificate{subject, std::move(public_key), root_.subject, now,
                     std::numeric_limits<double>::infinity()};
}

std::vector<std::shared_ptr<const Record>>
IdentityManager::make_genesis(const std::vector<Certificate>& certs)
{
  std::vector<std::shared_ptr<const Record>> out;
  auto signer = signing_identity();
  for (std::uint32_t i = 0; i < certs.size(); ++i) {
    GenesisBody body{i, certs[i]};
    RecordPayload payload{PayloadKind::Genesis, encode_genesis(body), std::nullopt};
    RecordContent content{root_.subject, {}, std::move(payload), signer.signer_key};
    auto rec = std::make_shared<const Record>(seal_record(std::move(content), *scheme_, private_key_));
    issued_[certs[i].subject] = rec->name;
    out.push_back(std::move(rec));
  }
  return out;
}

Record IdentityManager::issue_certificate(const LedgerState& ledger, const EntityId& subject,
                                          Bytes public_key, double now, std::mt19937_64& rng)
{
  if (ledger.active_certificate(subject))
    throw DuplicateSubject(subject.str() + " already holds a confirmed certificate");
  if (auto it = issued_.find(subject); it != issued_.end()) {
    bool revoked = ledger.revocation_status(it->second).state == RevocationStatus::State::Revoked;
    if (!revoked)
      throw DuplicateSubject(subject.str() + " already has a certificate issued");
  }
  auto cert = make_certificate(subject, std::move(public_key), now);
  RecordPayload payload{PayloadKind::CertIssuance, encode_certificate(cert), std::nullopt};
  auto rec = create_record(ledger, signing_identity(), std::move(payload), rng);
  issued_[subject] = rec.name;
  return rec;
}

Record IdentityManager::revoke_certificate(const LedgerState& ledger, const RecordName& cert,
                                           std::string reason, std::mt19937_64& rng)
{
  auto target = ledger.find(cert);
  if (!target || !certificate_of(*target) || !ledger.is_confirmed(cert))
    throw UnknownCert("no confirmed certificate record " + cert.to_uri());
  auto prev = last_revocation_ ? last_revocation_ : ledger.revocation_head();
  RevocationNotice notice{cert, std::move(reason)};
  RecordPayload payload{PayloadKind::CertRevocation, encode_revocation(notice), prev};
  auto rec = create_record(ledger, signing_identity(), std::move(payload), rng);
  last_revocation_ = rec.name;
  return rec;
}

} // namespace dledger
