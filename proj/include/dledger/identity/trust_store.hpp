#pragma once

#include "dledger/record/types.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace dledger {

class LedgerState;

/// Locator under which a manager's self-issued root certificate is referenced.
KeyLocator root_locator(const Certificate& root);

/// Identity-manager roots installed out of band, plus a cache of certificates
/// resolved from the ledger.
class TrustStore
{
public:
  /// `root` must be self-issued (subject == issuer).
  void add_root(const Certificate& root);

  const Certificate* find_root(const KeyLocator& locator) const;
  bool is_root(const KeyLocator& locator) const { return find_root(locator) != nullptr; }

  /// Root whose subject is `manager`, if that manager is trusted.
  const KeyLocator* root_of_manager(const EntityId& manager) const;

  std::vector<Certificate> roots() const;

  const Certificate* cached(const KeyLocator& locator) const;
  void remember(const KeyLocator& locator, const Certificate& cert);
  void invalidate_cache() { resolved_.clear(); }

private:
  std::map<KeyLocator, Certificate> roots_;
  std::map<EntityId, KeyLocator> manager_roots_;
  std::map<KeyLocator, Certificate> resolved_;
};

enum class ResolveError
{
  NotFound,
  NotConfirmed,
  Revoked,
  Untrusted,
  Expired,
};

std::string to_string(ResolveError error);

struct SignerResolution
{
  std::optional<Certificate> certificate;
  ResolveError error = ResolveError::NotFound;

  explicit operator bool() const { return certificate.has_value(); }
};

/// A certificate is honored iff it is a trusted root, or its issuance record is
/// confirmed in `ledger`, was signed by the issuing manager's root, is unrevoked
/// and is inside its validity window at `now`. Positive results are cached in
/// `trust` until a revocation confirms.
SignerResolution resolve_signer(TrustStore& trust, const LedgerState& ledger,
                                const KeyLocator& locator, double now);

} // namespace dledger
