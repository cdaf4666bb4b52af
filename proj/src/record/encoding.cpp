#include "dledger/record/encoding.hpp"

namespace dledger {

void write_name(TlvWriter& w, std::uint8_t type, const RecordName& name)
{
  auto m = w.begin(type);
  w.put(tlv::Generator, name.generator.str());
  w.put(tlv::NameDigest, name.digest);
  w.end(m);
}

RecordName read_name(TlvReader& r, std::uint8_t type)
{
  TlvReader inner(r.read(type));
  RecordName name;
  try {
    name.generator = EntityId(inner.read_string(tlv::Generator));
  }
  catch (const std::invalid_argument& e) {
    throw DecodeError(e.what());
  }
  auto digest = inner.read(tlv::NameDigest);
  if (digest.size() != kDigestSize)
    throw DecodeError("bad digest length");
  std::copy(digest.begin(), digest.end(), name.digest.begin());
  inner.expect_end();
  return name;
}

namespace {

void write_content(TlvWriter& w, const RecordContent& c, std::size_t max_payload)
{
  if (c.payload.body.size() > max_payload)
    throw OversizePayload("payload body of " + std::to_string(c.payload.body.size()) +
                          " bytes exceeds limit of " + std::to_string(max_payload));
  if (c.payload.prev_revocation && c.payload.kind != PayloadKind::CertRevocation)
    throw std::invalid_argument("prev_revocation is only allowed on revocation records");

  auto m = w.begin(tlv::Content);
  w.put(tlv::Generator, c.generator.str());
  auto a = w.begin(tlv::Approved);
  for (const auto& name : c.approved)
    write_name(w, tlv::Name, name);
  w.end(a);
  w.put_u8(tlv::PayloadKind, static_cast<std::uint8_t>(c.payload.kind));
  w.put(tlv::PayloadBody, c.payload.body);
  if (c.payload.prev_revocation)
    write_name(w, tlv::PrevRevocation, *c.payload.prev_revocation);
  write_name(w, tlv::SignerKey, c.signer_key);
  w.end(m);
}

RecordContent read_content(TlvReader& outer, std::size_t max_payload)
{
  TlvReader r(outer.read(tlv::Content));
  RecordContent c;
  try {
    c.generator = EntityId(r.read_string(tlv::Generator));
  }
  catch (const std::invalid_argument& e) {
    throw DecodeError(e.what());
  }
  TlvReader approved(r.read(tlv::Approved));
  while (!approved.at_end())
    c.approved.push_back(read_name(approved, tlv::Name));

  auto kind = r.read_u8(tlv::PayloadKind);
  if (kind < 1 || kind > 4)
    throw DecodeError("unknown payload kind " + std::to_string(kind));
  c.payload.kind = static_cast<PayloadKind>(kind);
  auto body = r.read(tlv::PayloadBody);
  if (body.size() > max_payload)
    throw OversizePayload("payload body exceeds limit");
  c.payload.body.assign(body.begin(), body.end());
  if (!r.at_end() && r.peek_type() == tlv::PrevRevocation) {
    if (c.payload.kind != PayloadKind::CertRevocation)
      throw DecodeError("prev_revocation on a non-revocation record");
    c.payload.prev_revocation = read_name(r, tlv::PrevRevocation);
  }
  c.signer_key = read_name(r, tlv::SignerKey);
  r.expect_end();
  return c;
}

} // namespace

Bytes canonical_encode(const RecordContent& content, std::size_t max_payload)
{
  TlvWriter w;
  write_content(w, content, max_payload);
  return std::move(w).bytes();
}

RecordContent decode_content(ByteView encoding, std::size_t max_payload)
{
  TlvReader r(encoding);
  auto c = read_content(r, max_payload);
  r.expect_end();
  return c;
}

RecordName compute_name(const EntityId& generator, ByteView encoding)
{
  return RecordName{generator, sha256(encoding)};
}

bool name_matches_content(const Record& record)
{
  if (record.name.generator != record.content.generator)
    return false;
  Bytes encoding;
  try {
    encoding = canonical_encode(record.content, SIZE_MAX);
  }
  catch (const std::exception&) {
    return false;
  }
  return sha256(encoding) == record.name.digest;
}

Bytes encode_record(const Record& record)
{
  TlvWriter w;
  auto m = w.begin(tlv::Record);
  write_name(w, tlv::Name, record.name);
  write_content(w, record.content, SIZE_MAX);
  w.put(tlv::Poa, record.poa);
  w.end(m);
  return std::move(w).bytes();
}

Record decode_record(ByteView wire, std::size_t max_payload)
{
  TlvReader outer(wire);
  TlvReader r(outer.read(tlv::Record));
  outer.expect_end();
  Record rec;
  rec.name = read_name(r, tlv::Name);
  rec.content = read_content(r, max_payload);
  auto poa = r.read(tlv::Poa);
  rec.poa.assign(poa.begin(), poa.end());
  r.expect_end();
  return rec;
}

Bytes sign_record(const RecordName& name, const SignatureScheme& scheme, ByteView private_key)
{
  return scheme.sign(private_key, as_bytes(name.to_uri()));
}

bool verify_name_signature(const RecordName& name, ByteView poa, const SignatureScheme& scheme,
                           ByteView public_key)
{
  return scheme.verify(public_key, as_bytes(name.to_uri()), poa);
}

bool verify_poa(const Record& record, const SignatureScheme& scheme, ByteView public_key)
{
  return name_matches_content(record) &&
         verify_name_signature(record.name, record.poa, scheme, public_key);
}

Record seal_record(RecordContent content, const SignatureScheme& scheme, ByteView private_key,
                   std::size_t max_payload)
{
  auto encoding = canonical_encode(content, max_payload);
  Record rec;
  rec.name = compute_name(content.generator, encoding);
  rec.content = std::move(content);
  rec.poa = sign_record(rec.name, scheme, private_key);
  return rec;
}

namespace {

void write_certificate(TlvWriter& w, const Certificate& cert)
{
  auto m = w.begin(tlv::Certificate);
  w.put(tlv::Subject, cert.subject.str());
  w.put(tlv::PublicKey, cert.public_key);
  w.put(tlv::Issuer, cert.issuer.str());
  w.put_f64(tlv::NotBefore, cert.not_before);
  w.put_f64(tlv::NotAfter, cert.not_after);
  w.end(m);
}

Certificate read_certificate(TlvReader& outer)
{
  TlvReader r(outer.read(tlv::Certificate));
  Certificate cert;
  try {
    cert.subject = EntityId(r.read_string(tlv::Subject));
    auto key = r.read(tlv::PublicKey);
    cert.public_key.assign(key.begin(), key.end());
    cert.issuer = EntityId(r.read_string(tlv::Issuer));
  }
  catch (const std::invalid_argument& e) {
    throw DecodeError(e.what());
  }
  cert.not_before = r.read_f64(tlv::NotBefore);
  cert.not_after = r.read_f64(tlv::NotAfter);
  r.expect_end();
  return cert;
}

} // namespace

Bytes encode_certificate(const Certificate& cert)
{
  TlvWriter w;
  write_certificate(w, cert);
  return std::move(w).bytes();
}

Certificate decode_certificate(ByteView bytes)
{
  TlvReader r(bytes);
  auto cert = read_certificate(r);
  r.expect_end();
  return cert;
}

Bytes encode_revocation(const RevocationNotice& notice)
{
  TlvWriter w;
  auto m = w.begin(tlv::Revocation);
  write_name(w, tlv::RevokedCert, notice.revoked_cert);
  w.put(tlv::Reason, notice.reason);
  w.end(m);
  return std::move(w).bytes();
}

RevocationNotice decode_revocation(ByteView bytes)
{
  TlvReader outer(bytes);
  TlvReader r(outer.read(tlv::Revocation));
  outer.expect_end();
  RevocationNotice notice;
  notice.revoked_cert = read_name(r, tlv::RevokedCert);
  notice.reason = r.read_string(tlv::Reason);
  r.expect_end();
  return notice;
}

Bytes encode_genesis(const GenesisBody& body)
{
  TlvWriter w;
  auto m = w.begin(tlv::Genesis);
  w.put_u32(tlv::GenesisIndex, body.index);
  if (body.certificate)
    write_certificate(w, *body.certificate);
  w.end(m);
  return std::move(w).bytes();
}

GenesisBody decode_genesis(ByteView bytes)
{
  TlvReader outer(bytes);
  TlvReader r(outer.read(tlv::Genesis));
  outer.expect_end();
  GenesisBody body;
  body.index = r.read_u32(tlv::GenesisIndex);
  if (!r.at_end())
    body.certificate = read_certificate(r);
  r.expect_end();
  return body;
}

std::optional<Certificate> certificate_of(const Record& record)
{
  try {
    switch (record.kind()) {
    case PayloadKind::CertIssuance:
      return decode_certificate(record.content.payload.body);
    case PayloadKind::Genesis:
      return decode_genesis(record.content.payload.body).certificate;
    default:
      return std::nullopt;
    }
  }
  catch (const DecodeError&) {
    return std::nullopt;
  }
}

} // namespace dledger
