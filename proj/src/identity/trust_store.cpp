#include "dledger/identity/trust_store.hpp"

#include "dledger/ledger/ledger_state.hpp"

#include <stdexcept>

namespace dledger {

KeyLocator root_locator(const Certificate& root)
{
  return KeyLocator{root.subject, sha256(encode_certificate(root))};
}

void TrustStore::add_root(const Certificate& root)
{
  if (root.subject != root.issuer)
    throw std::invalid_argument("root certificate must be self-issued");
  auto locator = root_locator(root);
  roots_[locator] = root;
  manager_roots_[root.subject] = locator;
}

const Certificate* TrustStore::find_root(const KeyLocator& locator) const
{
  auto it = roots_.find(locator);
  return it == roots_.end() ? nullptr : &it->second;
}

const KeyLocator* TrustStore::root_of_manager(const EntityId& manager) const
{
  auto it = manager_roots_.find(manager);
  return it == manager_roots_.end() ? nullptr : &it->second;
}

std::vector<Certificate> TrustStore::roots() const
{
  std::vector<Certificate> out;
  for (const auto& [locator, cert] : roots_)
    out.push_back(cert);
  return out;
}

const Certificate* TrustStore::cached(const KeyLocator& locator) const
{
  auto it = resolved_.find(locator);
  return it == resolved_.end() ? nullptr : &it->second;
}

void TrustStore::remember(const KeyLocator& locator, const Certificate& cert)
{
  resolved_[locator] = cert;
}

std::string to_string(ResolveError error)
{
  switch (error) {
  case ResolveError::NotFound: return "NotFound";
  case ResolveError::NotConfirmed: return "NotConfirmed";
  case ResolveError::Revoked: return "Revoked";
  case ResolveError::Untrusted: return "Untrusted";
  case ResolveError::Expired: return "Expired";
  }
  return "?";
}

namespace {

SignerResolution fail(ResolveError e)
{
  SignerResolution r;
  r.error = e;
  return r;
}

SignerResolution ok(const Certificate& cert)
{
  SignerResolution r;
  r.certificate = cert;
  return r;
}

} // namespace

SignerResolution resolve_signer(TrustStore& trust, const LedgerState& ledger,
                                const KeyLocator& locator, double now)
{
  if (const auto* root = trust.find_root(locator))
    return root->valid_at(now) ? ok(*root) : fail(ResolveError::Expired);
  if (const auto* hit = trust.cached(locator))
    return hit->valid_at(now) ? ok(*hit) : fail(ResolveError::Expired);

  auto record = ledger.find(locator);
  if (!record)
    return fail(ResolveError::NotFound);
  auto cert = certificate_of(*record);
  if (!cert)
    return fail(ResolveError::Untrusted);
  const auto* issuer_root = trust.root_of_manager(cert->issuer);
  if (!issuer_root || record->content.signer_key != *issuer_root ||
      record->generator() != cert->issuer)
    return fail(ResolveError::Untrusted);
  if (!ledger.is_confirmed(locator))
    return fail(ResolveError::NotConfirmed);
  if (ledger.revocation_status(locator).state == RevocationStatus::State::Revoked)
    return fail(ResolveError::Revoked);
  if (!cert->valid_at(now))
    return fail(ResolveError::Expired);
  trust.remember(locator, *cert);
  return ok(*cert);
}

} // namespace dledger
