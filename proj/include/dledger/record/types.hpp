#pragma once

#include "dledger/record/bytes.hpp"
#include "dledger/record/crypto.hpp"

#include <compare>
#include <cstring>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace dledger {

/// Name prefix shared by every ledger name.
inline constexpr std::string_view kLedgerPrefix = "DLedger";

/// One name component identifying a ledger participant.
class EntityId
{
public:
  EntityId() = default;

  /// Throws std::invalid_argument for an empty label, a label containing '/',
  /// or one of the reserved protocol components (NOTIF, SYNC).
  explicit EntityId(std::string label);

  const std::string& str() const { return label_; }
  bool empty() const { return label_.empty(); }

  auto operator<=>(const EntityId&) const = default;
  bool operator==(const EntityId&) const = default;

private:
  std::string label_;
};

/// "/DLedger/<generator>/<lowercase hex digest>"
struct RecordName
{
  EntityId generator;
  Digest digest{};

  std::string to_uri() const;

  /// Throws std::invalid_argument unless `uri` has exactly the three-component shape.
  static RecordName parse(std::string_view uri);

  auto operator<=>(const RecordName&) const = default;
  bool operator==(const RecordName&) const = default;
};

/// Names the certificate record (or trust-root certificate) of a signing key.
using KeyLocator = RecordName;

enum class PayloadKind : std::uint8_t
{
  Application = 1,
  CertIssuance = 2,
  CertRevocation = 3,
  Genesis = 4,
};

std::string to_string(PayloadKind kind);

struct RecordPayload
{
  PayloadKind kind = PayloadKind::Application;
  Bytes body;
  // Only meaningful for CertRevocation; absent on the first revocation.
  std::optional<RecordName> prev_revocation;

  bool operator==(const RecordPayload&) const = default;
};

/// Every field covered by the record digest.
struct RecordContent
{
  EntityId generator;
  std::vector<RecordName> approved;
  RecordPayload payload;
  KeyLocator signer_key;

  bool operator==(const RecordContent&) const = default;
};

struct Record
{
  RecordName name;
  RecordContent content;
  Bytes poa;

  const EntityId& generator() const { return content.generator; }
  const std::vector<RecordName>& approved() const { return content.approved; }
  PayloadKind kind() const { return content.payload.kind; }

  bool operator==(const Record&) const = default;
};

struct Certificate
{
  EntityId subject;
  Bytes public_key;
  EntityId issuer;
  double not_before = 0.0;
  double not_after = std::numeric_limits<double>::infinity();

  bool valid_at(double t) const { return t >= not_before && t <= not_after; }

  bool operator==(const Certificate&) const = default;
};

struct RevocationNotice
{
  RecordName revoked_cert;
  std::string reason;

  bool operator==(const RevocationNotice&) const = default;
};

/// Body of a genesis record: a bootstrap index (keeps digests distinct) and an
/// optional certificate installed together with the genesis set.
struct GenesisBody
{
  std::uint32_t index = 0;
  std::optional<Certificate> certificate;

  bool operator==(const GenesisBody&) const = default;
};

struct RecordNameHash
{
  std::size_t operator()(const RecordName& name) const noexcept
  {
    std::size_t h;
    std::memcpy(&h, name.digest.data(), sizeof h);
    return h;
  }
};

} // namespace dledger

template <>
struct std::hash<dledger::EntityId>
{
  std::size_t operator()(const dledger::EntityId& id) const noexcept
  {
    return std::hash<std::string>{}(id.str());
  }
};

template <>
struct std::hash<dledger::RecordName> : dledger::RecordNameHash
{
};
