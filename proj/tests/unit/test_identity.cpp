#include <doctest.h>

#include "../support/world.hpp"

using namespace dledger;
using dledger::testing::World;

namespace {

// Publishes records from rotating entities until `target` confirms.
void bury(const World& w, LedgerState& L, const RecordName& target, double t,
          std::mt19937_64& rng, std::size_t entities = 0)
{
  if (entities == 0)
    entities = w.ids.size();
  for (int i = 0; i < 200 && !L.is_confirmed(target); ++i) {
    auto rec = create_record(L, w.ids[i % entities],
                             {PayloadKind::Application, to_bytes("fill" + std::to_string(i)), {}},
                             rng);
    auto o = L.admit(std::make_shared<const Record>(std::move(rec)), Arrival::Tailing, t);
    REQUIRE(o.verdict.is_accepted());
  }
  REQUIRE(L.is_confirmed(target));
}

} // namespace

TEST_CASE("root certificates and locators")
{
  World w(2);
  const auto& root = w.manager->root_certificate();
  CHECK(root.subject == root.issuer);
  TrustStore t;
  t.add_root(root);
  CHECK(t.is_root(root_locator(root)));
  CHECK(*t.root_of_manager(EntityId("mgr")) == root_locator(root));
  Certificate not_root{EntityId("x"), {}, EntityId("mgr")};
  CHECK_THROWS_AS(t.add_root(not_root), std::invalid_argument);
}

TEST_CASE("certificate issuance")
{
  World w(3);
  auto L = w.ledger(World::config(3, 2));
  std::mt19937_64 rng(3);
  auto newbie_keys = w.scheme->generate_key(rng);
  EntityId newbie("newbie");

  // The manager needs foreign records to approve; genesis records are its own.
  auto warm = w.make(0, {w.g(0), w.g(1)}, "w");
  REQUIRE(L.admit(warm, Arrival::Tailing, 1).verdict.is_accepted());
  auto warm2 = w.make(1, {w.g(2), w.g(0)}, "w2");
  REQUIRE(L.admit(warm2, Arrival::Tailing, 1).verdict.is_accepted());

  auto issue = std::make_shared<const Record>(
    w.manager->issue_certificate(L, newbie, newbie_keys.public_key, 1, rng));
  CHECK(issue->kind() == PayloadKind::CertIssuance);
  auto cert = certificate_of(*issue);
  REQUIRE(cert);
  CHECK(cert->subject == newbie);
  CHECK(cert->issuer == EntityId("mgr"));
  CHECK(cert->public_key == newbie_keys.public_key);
  REQUIRE(L.admit(issue, Arrival::Tailing, 2).verdict.is_accepted());

  CHECK_THROWS_AS(w.manager->issue_certificate(L, newbie, newbie_keys.public_key, 2, rng),
                  DuplicateSubject);
  CHECK_THROWS_AS(w.manager->issue_certificate(L, EntityId("e0"), newbie_keys.public_key, 2, rng),
                  DuplicateSubject);

  SigningIdentity nid{newbie, issue->name, newbie_keys.private_key};
  auto early = std::make_shared<const Record>(
    create_record(L, nid, {PayloadKind::Application, to_bytes("hi"), {}}, rng));

  SUBCASE("resolution outcomes")
  {
    CHECK(L.resolve_signer(issue->name, 3).error == ResolveError::NotConfirmed);
    CHECK(L.resolve_signer(RecordName{EntityId("mgr"), Digest{7}}, 3).error ==
          ResolveError::NotFound);
    CHECK(L.resolve_signer(warm->name, 3).error == ResolveError::Untrusted);
    CHECK(L.resolve_signer(w.g(0), 3)); // genesis-borne certificate
    CHECK(L.resolve_signer(w.manager->root_key_locator(), 3));
  }
  SUBCASE("records wait for the certificate to confirm")
  {
    auto o = L.admit(early, Arrival::Tailing, 3);
    REQUIRE(o.verdict.is_rejected());
    CHECK(o.verdict.reason == RejectReason::CertNotConfirmed);
    CHECK_FALSE(L.knows(early->name));
    bury(w, L, issue->name, 4, rng);
    CHECK(L.admit(early, Arrival::Backfill, 5).verdict.is_accepted());
    CHECK(L.active_certificate(newbie) == issue->name);
    CHECK(L.honored_certificates().contains(issue->name));
  }
  SUBCASE("only a root may issue certificates")
  {
    RecordPayload p{PayloadKind::CertIssuance,
                    encode_certificate(w.manager->make_certificate(EntityId("evil"), {1}, 0)),
                    std::nullopt};
    auto fake = std::make_shared<const Record>(create_record(L, w.ids[1], p, rng));
    auto o = L.admit(fake, Arrival::Tailing, 3);
    REQUIRE(o.verdict.is_rejected());
    CHECK(o.verdict.reason == RejectReason::PoAInvalid);
  }
}

TEST_CASE("revocation chain")
{
  World w(4);
  auto L = w.ledger(World::config(3, 2));
  std::mt19937_64 rng(8);
  auto warm = w.make(0, {w.g(0), w.g(1)}, "w");
  L.admit(warm, Arrival::Tailing, 1);
  auto warm2 = w.make(1, {w.g(2), w.g(0)}, "w2");
  L.admit(warm2, Arrival::Tailing, 1);

  CHECK(L.revocation_status(w.g(3)).state == RevocationStatus::State::Valid);
  CHECK(L.revocation_status(RecordName{EntityId("x"), {}}).state ==
        RevocationStatus::State::Unknown);
  CHECK_THROWS_AS(w.manager->revoke_certificate(L, warm->name, "no", rng), UnknownCert);
  CHECK_THROWS_AS(w.manager->revoke_certificate(L, RecordName{EntityId("x"), {}}, "no", rng),
                  UnknownCert);

  auto r1 = std::make_shared<const Record>(
    w.manager->revoke_certificate(L, w.g(3), "compromised", rng));
  CHECK_FALSE(r1->content.payload.prev_revocation.has_value());
  REQUIRE(L.admit(r1, Arrival::Tailing, 2).verdict.is_accepted());

  // Unconfirmed revocation has no effect yet.
  CHECK(L.revocation_status(w.g(3)).state == RevocationStatus::State::Valid);
  auto spam_before = std::make_shared<const Record>(
    create_record(L, w.ids[3], {PayloadKind::Application, to_bytes("s0"), {}}, rng));
  CHECK(L.admit(spam_before, Arrival::Tailing, 2).verdict.is_accepted());

  bury(w, L, r1->name, 3, rng, 3);
  auto st = L.revocation_status(w.g(3));
  CHECK(st.state == RevocationStatus::State::Revoked);
  CHECK(st.revoked_at == r1->name);
  CHECK(L.revocation_head() == r1->name);
  CHECK(L.resolve_signer(w.g(3), 4).error == ResolveError::Revoked);
  CHECK_FALSE(L.active_certificate(EntityId("e3")).has_value());

  auto spam_after = w.make(3, {warm->name, warm2->name}, "s1");
  auto o = L.admit(spam_after, Arrival::Tailing, 5);
  REQUIRE(o.verdict.is_rejected());
  CHECK(o.verdict.reason == RejectReason::CertRevoked);

  auto r2 = std::make_shared<const Record>(
    w.manager->revoke_certificate(L, w.g(2), "retired", rng));
  CHECK(r2->content.payload.prev_revocation == r1->name);
  REQUIRE(L.admit(r2, Arrival::Tailing, 6).verdict.is_accepted());
  // e2 stays usable until r2 confirms.
  for (int i = 0; i < 200 && !L.is_confirmed(r2->name); ++i) {
    auto who = i % 3;
    auto rec = create_record(L, w.ids[who], {PayloadKind::Application, to_bytes("f"), {}}, rng);
    L.admit(std::make_shared<const Record>(std::move(rec)), Arrival::Tailing, 7);
  }
  REQUIRE(L.is_confirmed(r2->name));
  CHECK(L.revocation_head() == r2->name);
  CHECK(L.revocation_status(w.g(2)).revoked_at == r2->name);
  CHECK(L.revocation_status(w.g(3)).revoked_at == r1->name);
  CHECK(L.revocation_status(w.g(1)).state == RevocationStatus::State::Valid);
}
