#include <doctest.h>

#include "dledger/record/encoding.hpp"

#include <random>

using namespace dledger;

namespace {

Digest random_digest(std::mt19937_64& rng)
{
  Digest d;
  for (auto& b : d)
    b = static_cast<std::uint8_t>(rng());
  return d;
}

EntityId random_entity(std::mt19937_64& rng)
{
  static const char alphabet[] = "abcdefghijklmnopqrstuvwxyz0123456789-_.";
  std::string s;
  auto len = 1 + rng() % 12;
  for (std::size_t i = 0; i < len; ++i)
    s += alphabet[rng() % (sizeof alphabet - 1)];
  if (s == "NOTIF" || s == "SYNC")
    s += "x";
  return EntityId(s);
}

RecordContent random_content(std::mt19937_64& rng)
{
  RecordContent c;
  c.generator = random_entity(rng);
  auto n = rng() % 5;
  for (std::size_t i = 0; i < n; ++i)
    c.approved.push_back({random_entity(rng), random_digest(rng)});
  c.payload.kind = static_cast<PayloadKind>(1 + rng() % 4);
  c.payload.body.resize(rng() % 300);
  for (auto& b : c.payload.body)
    b = static_cast<std::uint8_t>(rng());
  if (c.payload.kind == PayloadKind::CertRevocation && rng() % 2)
    c.payload.prev_revocation = RecordName{random_entity(rng), random_digest(rng)};
  c.signer_key = {random_entity(rng), random_digest(rng)};
  return c;
}

} // namespace

TEST_CASE("hex round trip and rejection")
{
  Bytes b{0x00, 0x7f, 0xff, 0x10};
  CHECK(to_hex(b) == "007fff10");
  CHECK(from_hex("007FFF10") == b);
  CHECK_THROWS_AS(from_hex("abc"), std::invalid_argument);
  CHECK_THROWS_AS(from_hex("zz"), std::invalid_argument);
}

TEST_CASE("sha256 known vector")
{
  CHECK(to_hex(sha256(as_bytes("abc"))) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("entity labels")
{
  CHECK(EntityId("gtw-node0").str() == "gtw-node0");
  CHECK_THROWS_AS(EntityId(""), std::invalid_argument);
  CHECK_THROWS_AS(EntityId("a/b"), std::invalid_argument);
  CHECK_THROWS_AS(EntityId("NOTIF"), std::invalid_argument);
  CHECK_THROWS_AS(EntityId("SYNC"), std::invalid_argument);
  CHECK(EntityId("a") < EntityId("b"));
}

TEST_CASE("record names render as three components")
{
  auto enc = canonical_encode({EntityId("gtw-node0"), {}, {}, {EntityId("m"), {}}});
  auto name = compute_name(EntityId("gtw-node0"), enc);
  auto uri = name.to_uri();
  CHECK(uri.rfind("/DLedger/gtw-node0/", 0) == 0);
  CHECK(uri.size() == std::string("/DLedger/gtw-node0/").size() + 64);
  for (char c : uri.substr(19))
    CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
  CHECK(RecordName::parse(uri) == name);
  CHECK(compute_name(EntityId("gtw-node0"), enc) == name);
  CHECK_THROWS(RecordName::parse("/DLedger/x"));
  CHECK_THROWS(RecordName::parse("/Other/x/" + std::string(64, 'a')));
  CHECK_THROWS(RecordName::parse("/DLedger/x/" + std::string(63, 'a')));
  CHECK_THROWS(RecordName::parse("/DLedger/x/" + std::string(64, 'A')));
}

TEST_CASE("canonical encoding is deterministic and injective")
{
  std::mt19937_64 rng(7);
  auto a = random_content(rng);
  auto b = a;
  CHECK(canonical_encode(a) == canonical_encode(b));
  if (b.approved.empty())
    b.approved.push_back({EntityId("x"), {}});
  else
    b.approved[0].digest[5] ^= 1;
  CHECK(canonical_encode(a) != canonical_encode(b));
}

TEST_CASE("decode then re-encode reproduces the bytes over a fuzzed corpus")
{
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    auto c = random_content(rng);
    auto bytes = canonical_encode(c);
    auto back = decode_content(bytes);
    CHECK(back == c);
    CHECK(canonical_encode(back) == bytes);

    Record r{compute_name(c.generator, bytes), c, Bytes{1, 2, 3}};
    auto wire = encode_record(r);
    CHECK(decode_record(wire) == r);
    CHECK(encode_record(decode_record(wire)) == wire);
  }
}

TEST_CASE("single bit flips change the digest")
{
  std::mt19937_64 rng(3);
  auto bytes = canonical_encode(random_content(rng));
  auto base = sha256(bytes);
  for (std::size_t i = 0; i < bytes.size(); i += 7) {
    auto copy = bytes;
    copy[i] ^= 0x01;
    auto d = sha256(copy);
    CHECK(d != base);
    int differing = 0;
    for (std::size_t k = 0; k < kDigestSize; ++k)
      differing += __builtin_popcount(d[k] ^ base[k]);
    // 256 fair coin flips; anything outside [80, 176] is ~1e-10 likely
    CHECK(differing > 80);
    CHECK(differing < 176);
  }
}

TEST_CASE("oversize payloads are refused")
{
  RecordContent c{EntityId("a"), {}, {PayloadKind::Application, Bytes(8 * 1024, 0), {}},
                  {EntityId("m"), {}}};
  CHECK_NOTHROW(canonical_encode(c));
  c.payload.body.push_back(0);
  CHECK_THROWS_AS(canonical_encode(c), OversizePayload);
  auto big = canonical_encode(c, SIZE_MAX);
  CHECK_THROWS_AS(decode_content(big), OversizePayload);
}

TEST_CASE("strict decoding")
{
  std::mt19937_64 rng(5);
  auto bytes = canonical_encode(random_content(rng));
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_content(truncated), DecodeError);
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_content(trailing), DecodeError);
  CHECK_THROWS_AS(decode_content(Bytes{}), DecodeError);
}

TEST_CASE("identity payload bodies round trip")
{
  Certificate cert{EntityId("node1"), Bytes{9, 8, 7}, EntityId("mgr"), 1.5, 99.0};
  CHECK(decode_certificate(encode_certificate(cert)) == cert);
  Certificate open{EntityId("node1"), Bytes{1}, EntityId("mgr")};
  CHECK(decode_certificate(encode_certificate(open)) == open);
  CHECK(open.valid_at(1e12));

  RevocationNotice notice{{EntityId("mgr"), Digest{}}, "key compromised"};
  CHECK(decode_revocation(encode_revocation(notice)) == notice);

  GenesisBody g{3, cert};
  CHECK(decode_genesis(encode_genesis(g)) == g);
  GenesisBody bare{4, std::nullopt};
  CHECK(decode_genesis(encode_genesis(bare)) == bare);
}

TEST_CASE("prev_revocation only on revocation records")
{
  RecordContent c{EntityId("a"), {}, {PayloadKind::Application, {}, RecordName{EntityId("m"), {}}},
                  {EntityId("m"), {}}};
  CHECK_THROWS_AS(canonical_encode(c), std::invalid_argument);
}

namespace {

void check_scheme(const SignatureScheme& scheme)
{
  std::mt19937_64 rng(99);
  auto alice = scheme.generate_key(rng);
  auto bob = scheme.generate_key(rng);
  RecordContent c{EntityId("alice"),
                  {{EntityId("bob"), Digest{1}}, {EntityId("carol"), Digest{2}}},
                  {PayloadKind::Application, to_bytes("reading=42"), {}},
                  {EntityId("mgr"), Digest{3}}};
  auto rec = seal_record(c, scheme, alice.private_key);
  CHECK(verify_poa(rec, scheme, alice.public_key));
  CHECK_FALSE(verify_poa(rec, scheme, bob.public_key));

  auto mutated = rec;
  mutated.content.payload.body[0] ^= 1;
  CHECK_FALSE(verify_poa(mutated, scheme, alice.public_key));

  // Every single-field mutation breaks verification under the original key.
  std::vector<std::function<void(Record&)>> mutations = {
    [](Record& r) { r.content.generator = EntityId("mallory"); },
    [](Record& r) { r.content.approved[0].digest[0] ^= 0x80; },
    [](Record& r) { r.content.approved[1].generator = EntityId("dave"); },
    [](Record& r) { std::swap(r.content.approved[0], r.content.approved[1]); },
    [](Record& r) { r.content.payload.kind = PayloadKind::CertIssuance; },
    [](Record& r) { r.content.payload.body.push_back(0); },
    [](Record& r) { r.content.signer_key.digest[31] ^= 1; },
    [](Record& r) { r.name.digest[0] ^= 1; },
    [](Record& r) { r.name.generator = EntityId("mallory"); },
    [](Record& r) { r.poa[r.poa.size() / 2] ^= 1; },
  };
  for (auto& m : mutations) {
    auto copy = rec;
    m(copy);
    CHECK_FALSE(verify_poa(copy, scheme, alice.public_key));
  }
}

} // namespace

TEST_CASE("signature schemes: sign, verify, reject mutations")
{
  HmacTestScheme hmac(Bytes{1, 2, 3});
  check_scheme(hmac);
  EcdsaP256Scheme ecdsa;
  check_scheme(ecdsa);
}

TEST_CASE("hmac test scheme is deterministic under a seed")
{
  HmacTestScheme a(Bytes{5}), b(Bytes{5}), other(Bytes{6});
  std::mt19937_64 r1(1), r2(1);
  auto k1 = a.generate_key(r1);
  auto k2 = b.generate_key(r2);
  CHECK(k1.public_key == k2.public_key);
  auto msg = as_bytes("hello");
  CHECK(a.sign(k1.private_key, msg) == b.sign(k2.private_key, msg));
  CHECK(b.verify(k1.public_key, msg, a.sign(k1.private_key, msg)));
  CHECK_FALSE(other.verify(k1.public_key, msg, a.sign(k1.private_key, msg)));
}

TEST_CASE("scheme factory")
{
  CHECK(make_signature_scheme("hmac-test", Bytes{1})->name() == "hmac-test");
  CHECK(make_signature_scheme("ecdsa-p256", {})->name() == "ecdsa-p256");
  CHECK_THROWS_AS(make_signature_scheme("rsa", {}), std::invalid_argument);
}
