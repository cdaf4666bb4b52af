#pragma once

#include "dledger/record/tlv.hpp"
#include "dledger/record/types.hpp"

#include <stdexcept>

namespace dledger {

inline constexpr std::size_t kDefaultMaxPayload = 8 * 1024;

class OversizePayload : public std::length_error
{
public:
  using std::length_error::length_error;
};

/// TLV type codes; docs/encoding.md describes the layout byte by byte.
namespace tlv {
inline constexpr std::uint8_t Name = 0x10;
inline constexpr std::uint8_t Generator = 0x11;
inline constexpr std::uint8_t NameDigest = 0x12;
inline constexpr std::uint8_t Content = 0x20;
inline constexpr std::uint8_t Approved = 0x21;
inline constexpr std::uint8_t PayloadKind = 0x22;
inline constexpr std::uint8_t PayloadBody = 0x23;
inline constexpr std::uint8_t PrevRevocation = 0x24;
inline constexpr std::uint8_t SignerKey = 0x25;
inline constexpr std::uint8_t Record = 0x30;
inline constexpr std::uint8_t Poa = 0x31;
inline constexpr std::uint8_t Certificate = 0x40;
inline constexpr std::uint8_t Subject = 0x41;
inline constexpr std::uint8_t PublicKey = 0x42;
inline constexpr std::uint8_t Issuer = 0x43;
inline constexpr std::uint8_t NotBefore = 0x44;
inline constexpr std::uint8_t NotAfter = 0x45;
inline constexpr std::uint8_t Revocation = 0x50;
inline constexpr std::uint8_t RevokedCert = 0x51;
inline constexpr std::uint8_t Reason = 0x52;
inline constexpr std::uint8_t Genesis = 0x60;
inline constexpr std::uint8_t GenesisIndex = 0x61;
} // namespace tlv

void write_name(TlvWriter& w, std::uint8_t type, const RecordName& name);
RecordName read_name(TlvReader& r, std::uint8_t type);

/// Deterministic encoding of every digest-covered field, in the fixed order
/// generator, approved, payload kind, payload body, prev_revocation, signer key.
/// Throws OversizePayload when the body exceeds `max_payload`.
Bytes canonical_encode(const RecordContent& content, std::size_t max_payload = kDefaultMaxPayload);

RecordContent decode_content(ByteView encoding, std::size_t max_payload = kDefaultMaxPayload);

RecordName compute_name(const EntityId& generator, ByteView encoding);

/// True when the record's digest equals SHA-256 of its canonical encoding.
bool name_matches_content(const Record& record);

/// Full wire form: name, canonical content and PoA.
Bytes encode_record(const Record& record);
Record decode_record(ByteView wire, std::size_t max_payload = kDefaultMaxPayload);

/// The PoA covers the rendered record name, which commits to the content via its digest.
Bytes sign_record(const RecordName& name, const SignatureScheme& scheme, ByteView private_key);

bool verify_name_signature(const RecordName& name, ByteView poa, const SignatureScheme& scheme,
                           ByteView public_key);

/// Name binding plus signature check.
bool verify_poa(const Record& record, const SignatureScheme& scheme, ByteView public_key);

/// Encodes, names and signs `content`.
Record seal_record(RecordContent content, const SignatureScheme& scheme, ByteView private_key,
                   std::size_t max_payload = kDefaultMaxPayload);

Bytes encode_certificate(const Certificate& cert);
Certificate decode_certificate(ByteView bytes);

Bytes encode_revocation(const RevocationNotice& notice);
RevocationNotice decode_revocation(ByteView bytes);

Bytes encode_genesis(const GenesisBody& body);
GenesisBody decode_genesis(ByteView bytes);

/// Certificate carried by a CertIssuance or certificate-bearing Genesis record.
std::optional<Certificate> certificate_of(const Record& record);

} // namespace dledger
