#include "dledger/record/types.hpp"

#include <stdexcept>

namespace dledger {

EntityId::EntityId(std::string label)
  : label_(std::move(label))
{
  if (label_.empty())
    throw std::invalid_argument("entity id must not be empty");
  if (label_.find('/') != std::string::npos)
    throw std::invalid_argument("entity id must not contain '/': " + label_);
  // These components route notification and sync Interests.
  if (label_ == "NOTIF" || label_ == "SYNC")
    throw std::invalid_argument("entity id is a reserved component: " + label_);
}

std::string RecordName::to_uri() const
{
  std::string uri;
  uri.reserve(10 + generator.str().size() + 2 * kDigestSize);
  uri += '/';
  uri += kLedgerPrefix;
  uri += '/';
  uri += generator.str();
  uri += '/';
  uri += to_hex(digest);
  return uri;
}

RecordName RecordName::parse(std::string_view uri)
{
  auto fail = [&] { throw std::invalid_argument("not a record name: " + std::string(uri)); };
  std::string prefix = "/" + std::string(kLedgerPrefix) + "/";
  if (uri.substr(0, prefix.size()) != prefix)
    fail();
  auto rest = uri.substr(prefix.size());
  auto slash = rest.find('/');
  if (slash == std::string_view::npos)
    fail();
  auto hex = rest.substr(slash + 1);
  if (hex.size() != 2 * kDigestSize || hex.find('/') != std::string_view::npos)
    fail();
  for (char c : hex)
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')))
      fail();

  RecordName name;
  name.generator = EntityId(std::string(rest.substr(0, slash)));
  auto bytes = from_hex(hex);
  std::copy(bytes.begin(), bytes.end(), name.digest.begin());
  return name;
}

std::string to_string(PayloadKind kind)
{
  switch (kind) {
  case PayloadKind::Application:
    return "application";
  case PayloadKind::CertIssuance:
    return "cert-issuance";
  case PayloadKind::CertRevocation:
    return "cert-revocation";
  case PayloadKind::Genesis:
    return "genesis";
  }
  return "unknown";
}

} // namespace dledger
