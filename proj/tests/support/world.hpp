#pragma once
// Small hand-driven world for ledger tests: one manager, a few entities whose
// certificates ride in the genesis records.

#include "dledger/identity/identity_manager.hpp"
#include "dledger/ledger/ledger_state.hpp"
#include "dledger/ledger/record_builder.hpp"

#include <algorithm>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace dledger::testing {

struct World
{
  std::shared_ptr<const SignatureScheme> scheme;
  std::mt19937_64 rng;
  std::unique_ptr<IdentityManager> manager;
  std::vector<SigningIdentity> ids;
  std::vector<Bytes> public_keys;
  std::vector<std::shared_ptr<const Record>> genesis;

  explicit World(std::size_t entities, std::uint64_t seed = 1,
                 std::string scheme_name = "hmac-test")
    : scheme(make_signature_scheme(scheme_name, Bytes{1, 2, 3, 4}))
    , rng(seed)
  {
    manager = std::make_unique<IdentityManager>(EntityId("mgr"), scheme, rng);
    std::vector<Certificate> certs;
    std::vector<Bytes> privs;
    for (std::size_t i = 0; i < entities; ++i) {
      auto keys = scheme->generate_key(rng);
      certs.push_back(manager->make_certificate(entity(i), keys.public_key, 0.0));
      public_keys.push_back(keys.public_key);
      privs.push_back(keys.private_key);
    }
    genesis = manager->make_genesis(certs);
    for (std::size_t i = 0; i < entities; ++i)
      ids.push_back({entity(i), genesis[i]->name, privs[i]});
  }

  static EntityId entity(std::size_t i) { return EntityId("e" + std::to_string(i)); }

  TrustStore trust() const
  {
    TrustStore t;
    t.add_root(manager->root_certificate());
    return t;
  }

  LedgerState ledger(LedgerConfig config, AppValidator validator = {}) const
  {
    LedgerState l(config, trust(), scheme, std::move(validator));
    for (const auto& g : genesis)
      l.inject_genesis(g);
    return l;
  }

  static LedgerConfig config(std::uint32_t w, std::uint32_t wc = 1, std::size_t n = 2)
  {
    LedgerConfig c;
    c.approvals_per_record = n;
    c.w_confirm = w;
    c.w_contribution = wc;
    return c;
  }

  std::shared_ptr<const Record> make(std::size_t who, std::vector<RecordName> approved,
                                     std::string body = "payload") const
  {
    RecordPayload p{PayloadKind::Application, to_bytes(body), std::nullopt};
    return std::make_shared<const Record>(
      create_record_approving(ids[who], std::move(approved), std::move(p), *scheme));
  }

  const RecordName& g(std::size_t i) const { return genesis[i]->name; }

  /// Random interlock-respecting DAG over the genesis set, in creation order.
  /// Parents lean towards recent records so the graph gets some depth.
  std::vector<std::shared_ptr<const Record>> random_dag(std::size_t count, std::mt19937_64& r,
                                                        std::size_t n = 2) const
  {
    std::vector<std::shared_ptr<const Record>> pool(genesis.begin(), genesis.end());
    std::vector<std::shared_ptr<const Record>> out;
    while (out.size() < count) {
      auto who = r() % ids.size();
      std::vector<RecordName> approved;
      for (int attempt = 0; attempt < 64 && approved.size() < n; ++attempt) {
        std::size_t idx = (r() % 10 < 7 && pool.size() > 8) ? pool.size() - 1 - r() % 8
                                                             : r() % pool.size();
        const auto& cand = pool[idx];
        if (cand->generator() == ids[who].entity)
          continue;
        if (std::find(approved.begin(), approved.end(), cand->name) != approved.end())
          continue;
        approved.push_back(cand->name);
      }
      if (approved.size() < n)
        continue;
      auto rec = make(who, approved, "r" + std::to_string(out.size()));
      pool.push_back(rec);
      out.push_back(rec);
    }
    return out;
  }
};

} // namespace dledger::testing
