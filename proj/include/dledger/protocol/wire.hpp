#pragma once

#include "dledger/net/name.hpp"
#include "dledger/record/encoding.hpp"

#include <optional>
#include <vector>

namespace dledger::protocol {

inline constexpr std::string_view kNotifComponent = "NOTIF";
inline constexpr std::string_view kSyncComponent = "SYNC";
inline constexpr std::size_t kMaxSyncParameter = 64 * 1024;

namespace tlv {
inline constexpr std::uint8_t SyncParameter = 0x70;
inline constexpr std::uint8_t SyncSeq = 0x71;
inline constexpr std::uint8_t SyncTotal = 0x72;
inline constexpr std::uint8_t NotifParameter = 0x78;
} // namespace tlv

/// Sorted tailing names and their digest: SHA-256 over the names' URIs, each
/// prefixed with its 4-byte big-endian length.
struct TailingDigest
{
  std::vector<RecordName> names;
  Digest digest{};

  static TailingDigest of(std::vector<RecordName> names);
};

/// One Sync Interest parameter. Long lists are split into `total` chunks.
struct SyncChunk
{
  std::uint32_t seq = 0;
  std::uint32_t total = 1;
  std::vector<RecordName> names;

  bool operator==(const SyncChunk&) const = default;
};

Bytes encode_sync(const SyncChunk& chunk);
SyncChunk decode_sync(ByteView bytes);

/// Splits `names` so that every encoded chunk is at most `max_bytes`.
std::vector<SyncChunk> chunk_sync(const std::vector<RecordName>& names,
                                  std::size_t max_bytes = kMaxSyncParameter);

/// Notification parameter: the PoA of the announced record and its signer.
struct NotifParameter
{
  Bytes poa;
  KeyLocator signer_key;

  bool operator==(const NotifParameter&) const = default;
};

Bytes encode_notif(const NotifParameter& p);
NotifParameter decode_notif(ByteView bytes);

net::Name record_net_name(const RecordName& name);
/// "/DLedger/NOTIF/<generator>/<hex>"
net::Name notif_name(const RecordName& name);
/// "/DLedger/SYNC/<hex digest>/<sender>/<chunk>"
net::Name sync_name(const Digest& digest, const EntityId& sender, std::uint32_t chunk);

/// Record name announced by a notification name; nullopt for anything else.
std::optional<RecordName> record_from_notif(const net::Name& name);
std::optional<RecordName> record_from_name(const net::Name& name);
bool is_sync_name(const net::Name& name);

} // namespace dledger::protocol
