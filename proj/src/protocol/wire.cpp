#include "dledger/protocol/wire.hpp"

#include <algorithm>
#include <string>

namespace dledger::protocol {

TailingDigest TailingDigest::of(std::vector<RecordName> names)
{
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  Bytes buf;
  for (const auto& n : names) {
    auto uri = n.to_uri();
    auto len = static_cast<std::uint32_t>(uri.size());
    for (int s = 24; s >= 0; s -= 8)
      buf.push_back(static_cast<std::uint8_t>(len >> s));
    buf.insert(buf.end(), uri.begin(), uri.end());
  }
  TailingDigest d;
  d.digest = sha256(buf);
  d.names = std::move(names);
  return d;
}

Bytes encode_sync(const SyncChunk& chunk)
{
  TlvWriter w;
  auto outer = w.begin(tlv::SyncParameter);
  w.put_u32(tlv::SyncSeq, chunk.seq);
  w.put_u32(tlv::SyncTotal, chunk.total);
  for (const auto& n : chunk.names)
    write_name(w, dledger::tlv::Name, n);
  w.end(outer);
  return std::move(w).bytes();
}

SyncChunk decode_sync(ByteView bytes)
{
  TlvReader outer(bytes);
  TlvReader r(outer.read(tlv::SyncParameter));
  outer.expect_end();
  SyncChunk c;
  c.seq = r.read_u32(tlv::SyncSeq);
  c.total = r.read_u32(tlv::SyncTotal);
  if (c.total == 0 || c.seq >= c.total)
    throw DecodeError("sync chunk index out of range");
  while (!r.at_end())
    c.names.push_back(read_name(r, dledger::tlv::Name));
  return c;
}

std::vector<SyncChunk> chunk_sync(const std::vector<RecordName>& names, std::size_t max_bytes)
{
  // Header: outer element + two u32 elements.
  constexpr std::size_t header = 5 + 2 * (5 + 4);
  std::vector<SyncChunk> out(1);
  std::size_t size = header;
  for (const auto& n : names) {
    TlvWriter w;
    write_name(w, dledger::tlv::Name, n);
    const auto len = w.bytes().size();
    if (header + len > max_bytes)
      throw std::length_error("sync chunk limit below one name");
    if (size + len > max_bytes) {
      out.emplace_back();
      size = header;
    }
    out.back().names.push_back(n);
    size += len;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].seq = static_cast<std::uint32_t>(i);
    out[i].total = static_cast<std::uint32_t>(out.size());
  }
  return out;
}

Bytes encode_notif(const NotifParameter& p)
{
  TlvWriter w;
  auto outer = w.begin(tlv::NotifParameter);
  w.put(dledger::tlv::Poa, p.poa);
  write_name(w, dledger::tlv::SignerKey, p.signer_key);
  w.end(outer);
  return std::move(w).bytes();
}

NotifParameter decode_notif(ByteView bytes)
{
  TlvReader outer(bytes);
  TlvReader r(outer.read(tlv::NotifParameter));
  outer.expect_end();
  NotifParameter p;
  auto poa = r.read(dledger::tlv::Poa);
  p.poa.assign(poa.begin(), poa.end());
  p.signer_key = read_name(r, dledger::tlv::SignerKey);
  r.expect_end();
  return p;
}

net::Name record_net_name(const RecordName& name)
{
  return net::Name(name.to_uri());
}

net::Name notif_name(const RecordName& name)
{
  return net::Name::from_components(
    {std::string(kLedgerPrefix), std::string(kNotifComponent), name.generator.str(), to_hex(name.digest)});
}

net::Name sync_name(const Digest& digest, const EntityId& sender, std::uint32_t chunk)
{
  return net::Name::from_components({std::string(kLedgerPrefix), std::string(kSyncComponent),
                                     to_hex(digest), sender.str(), std::to_string(chunk)});
}

std::optional<RecordName> record_from_notif(const net::Name& name)
{
  if (name.size() != 4 || name.component(0) != kLedgerPrefix || name.component(1) != kNotifComponent)
    return std::nullopt;
  try {
    return RecordName::parse("/" + std::string(kLedgerPrefix) + "/" + std::string(name.component(2)) +
                             "/" + std::string(name.component(3)));
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

std::optional<RecordName> record_from_name(const net::Name& name)
{
  if (name.size() != 3 || name.component(0) != kLedgerPrefix)
    return std::nullopt;
  try {
    return RecordName::parse(name.uri());
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

bool is_sync_name(const net::Name& name)
{
  return name.size() >= 3 && name.component(0) == kLedgerPrefix && name.component(1) == kSyncComponent;
}

} // namespace dledger::protocol
