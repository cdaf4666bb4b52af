#include "dledger/ledger/export.hpp"
#include "dledger/sim/adversary.hpp"
#include "dledger/sim/oracle.hpp"
#include "dledger/sim/scenario.hpp"
#include "dledger/sim/simulation.hpp"
#include "dledger/sim/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace dledger;
using namespace dledger::sim;

namespace {

// N * (H_N - H_{N-W}) with harmonic numbers summed upwards in long double.
long double harmonic_difference(std::uint32_t w, std::size_t n)
{
  long double h_n = 0, h_nw = 0;
  for (std::size_t k = 1; k <= n; ++k)
    h_n += 1.0L / static_cast<long double>(k);
  for (std::size_t k = 1; k <= n - w; ++k)
    h_nw += 1.0L / static_cast<long double>(k);
  return static_cast<long double>(n) * (h_n - h_nw);
}

Scenario small(std::uint64_t seed = 3)
{
  Scenario s;
  s.name = "small";
  s.seed = seed;
  s.entities = 6;
  s.duration = 120;
  s.lambda = 0.3;
  s.w_confirm = 3;
  s.w_contribution = 2;
  s.latency = 0.05;
  s.jitter = 0.01;
  s.sample_interval = 5;
  s.publish_until = 90;
  s.liveness_grace = 40;
  return s;
}

std::string slurp(const std::filesystem::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("oracle values")
{
  CHECK(predicted_tailing(2, 10.0, 0.2) == doctest::Approx(4.0));
  CHECK(predicted_tailing(1000000, 10.0, 0.2) == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(predicted_tailing(3, 2.0, 1.5) == doctest::Approx(4.5));

  const double a = predicted_approvals(20, 50);
  CHECK(a == doctest::Approx(static_cast<double>(harmonic_difference(20, 50))).epsilon(1e-12));
  CHECK(std::abs(a - 25.21) < 0.01);
  CHECK(confirmation_bound(50, 20, 2, 0.2) == doctest::Approx(2 * 0.2 * a));

  for (std::size_t n = 1; n <= 100; ++n)
    CHECK(predicted_approvals(1, n) == 1.0);
  CHECK(predicted_approvals(7, 7) == doctest::Approx(static_cast<double>(harmonic_difference(7, 7))));

  CHECK_THROWS_AS(predicted_approvals(51, 50), WConfirmExceedsN);
  CHECK_THROWS_AS(confirmation_bound(5, 6, 2, 1.0), WConfirmExceedsN);
  CHECK_THROWS(predicted_approvals(0, 50));
}

TEST_CASE("oracle monotonicity")
{
  for (std::size_t n : {5u, 20u, 50u})
    for (std::uint32_t w = 1; w < n; ++w)
      CHECK(predicted_approvals(w + 1, n) > predicted_approvals(w, n));
  double prev = 0;
  for (double lambda = 0.5; lambda < 20; lambda += 0.5) {
    CHECK(predicted_tailing(2, lambda, 0.3) > prev);
    prev = predicted_tailing(2, lambda, 0.3);
  }
  prev = 0;
  for (double t = 0.05; t < 3; t += 0.05) {
    CHECK(predicted_tailing(2, 4.0, t) > prev);
    prev = predicted_tailing(2, 4.0, t);
  }
}

TEST_CASE("statistics")
{
  CHECK(mean({1, 2, 3, 4}) == doctest::Approx(2.5));
  CHECK(stddev({2, 4, 4, 4, 5, 5, 7, 9}) == doctest::Approx(2.13809).epsilon(1e-5));
  CHECK(stddev({3}) == 0.0);
  CHECK(coefficient_of_variation({10, 10, 10}) == 0.0);
  CHECK(tail({1, 2, 3, 4, 5, 6}) == std::vector<double>{4, 5, 6});

  // S = 10, Var = 5*4*15/18, z = (S - 1) / sqrt(Var).
  auto mk = mann_kendall({1, 2, 3, 4, 5});
  CHECK(mk.s == 10);
  CHECK(mk.variance == doctest::Approx(50.0 / 3.0));
  CHECK(mk.z == doctest::Approx(9.0 / std::sqrt(50.0 / 3.0)));
  CHECK(mk.p_value == doctest::Approx(0.02749).epsilon(1e-3));
  CHECK(mk.trend());

  // Ties: groups of size 2 reduce the variance by 2*1*9/18 each.
  auto tied = mann_kendall({1, 1, 2, 2, 3});
  CHECK(tied.variance == doctest::Approx(50.0 / 3.0 - 2.0));

  CHECK_FALSE(mann_kendall({5, 5, 5, 5, 5, 5}).trend());
  CHECK_FALSE(mann_kendall({3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 3, 2, 3, 8, 4}).trend());
  CHECK(mann_kendall({9, 8, 7, 7, 6, 5, 4, 3, 3, 2}).z < 0);
}

TEST_CASE("scenario parsing")
{
  auto s = parse_scenario(R"(
name: t
seed: 7
entities: 9
topology: grid
grid_width: 3
w_confirm: 8
link: {latency: 0.1, loss: 0.01}
partitions:
  - {groups: [[0, 1], [2, 3]], from: 5, to: 10}
adversaries:
  - {kind: colluders, entity: 2, k: 2, at: 3, observer: 8}
)");
  CHECK(s.name == "t");
  CHECK(s.seed == 7);
  CHECK(s.topology == Topology::Grid);
  CHECK(s.latency == 0.1);
  CHECK(s.loss == 0.01);
  CHECK(s.effective_w_contribution() == 2);
  REQUIRE(s.partitions.size() == 1);
  CHECK(s.partitions[0].groups[1] == std::vector<std::size_t>{2, 3});
  REQUIRE(s.adversaries.size() == 1);
  CHECK(s.adversaries[0].kind == AdversaryKind::Colluders);
  CHECK(s.adversaries[0].observer == 8u);

  CHECK_THROWS_AS(parse_scenario("bogus: 1\n"), ConfigInvalid);
  CHECK_THROWS_AS(parse_scenario("link: {latency: 1, speed: 2}\n"), ConfigInvalid);
  CHECK_THROWS_AS(parse_scenario("entities: 2\n"), ConfigInvalid);
  CHECK_THROWS_AS(parse_scenario("lambda: 0\n"), ConfigInvalid);
  CHECK_THROWS_AS(parse_scenario("w_confirm: 4\nw_contribution: 4\n"), ConfigInvalid);
  CHECK_THROWS_AS(parse_scenario("topology: ring\n"), ConfigInvalid);
  CHECK_THROWS_AS(parse_scenario("entities: [1\n"), ConfigInvalid);
  CHECK_THROWS_AS(parse_scenario("partitions:\n  - {groups: [[0]], from: 1, to: 5}\n"
                                 "  - {groups: [[1]], from: 4, to: 9}\n"),
                  ConfigInvalid);
  CHECK_THROWS_AS(parse_scenario("adversaries:\n  - {kind: spammer, entity: 10}\n"), ConfigInvalid);
  CHECK_THROWS_AS(load_scenario("/nonexistent/x.yaml"), ConfigInvalid);
}

TEST_CASE("bundled scenarios load")
{
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(DLEDGER_SCENARIO_DIR)) {
    if (entry.path().extension() != ".yaml")
      continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_scenario(entry.path()));
    ++count;
  }
  CHECK(count >= 10);
}

TEST_CASE("CSV headers")
{
  MetricsLog m;
  CHECK(m.samples_csv() == "time,peer,unconfirmed,tailing,stored,pending,depth\n");
  CHECK(m.records_csv() == "name,generator,published,visible_all,confirmed_local,confirmed_all\n");
  CHECK(m.links_csv() == "a,b,interests_ab,interests_ba,data_ab,data_ba,dropped\n");
  CHECK(m.rejections_csv() == "peer,reason,count\n");
  CHECK(m.security_csv() == "time,peer,kind,detail\n");
  CHECK(m.summary_csv() == "key,value\n");

  m.security.push_back({1.5, "p1", "NotifPoAInvalid", "a,\"b\""});
  CHECK(m.security_csv() == "time,peer,kind,detail\n1.500000,p1,NotifPoAInvalid,\"a,\"\"b\"\"\"\n");
  CHECK_THROWS_AS(m.write_csv("/proc/nonexistent/dir"), IoError);
}

TEST_CASE("small honest run")
{
  Simulation sim(small());
  sim.run();
  const auto& m = sim.metrics();
  CHECK(sim.honest().size() == 6);
  CHECK(m.records.size() > 100);
  CHECK(sim.liveness_violations() == 0);
  CHECK(sim.honest_policy_violations() == 0);
  CHECK(sim.honest_sets_identical());
  CHECK(sim.measured_propagation() > 0.1);
  CHECK(sim.mean_confirmation_latency() > 0);
  CHECK(m.sample_times().size() == 24);
  CHECK(m.samples.size() == 24 * 6);
  CHECK(m.links.size() == 15);
  for (const auto& r : m.records) {
    REQUIRE(r.visible_all);
    CHECK(*r.visible_all >= r.published);
  }
  // Timestamps never go backwards.
  for (std::size_t i = 1; i < m.samples.size(); ++i)
    CHECK(m.samples[i].time >= m.samples[i - 1].time);
}

TEST_CASE("runs are deterministic per seed")
{
  auto a = run_scenario(small(11));
  auto b = run_scenario(small(11));
  auto c = run_scenario(small(12));
  CHECK(a.samples_csv() == b.samples_csv());
  CHECK(a.records_csv() == b.records_csv());
  CHECK(a.links_csv() == b.links_csv());
  CHECK(a.summary_csv() == b.summary_csv());
  CHECK(a.records_csv() != c.records_csv());
}

TEST_CASE("outputs are written and dumps verify")
{
  Simulation sim(small(5));
  sim.run();
  auto dir = std::filesystem::temp_directory_path() / "dledger_test_outputs";
  std::filesystem::remove_all(dir);
  sim.write_outputs(dir, {OutputFormat::Csv, OutputFormat::Dot, OutputFormat::Dump});
  for (const char* f : {"samples.csv", "records.csv", "links.csv", "rejections.csv", "security.csv",
                        "summary.csv", "ledger.dot", "ledger.dump", "peers/p5.dump"})
    CHECK(std::filesystem::exists(dir / f));
  CHECK(slurp(dir / "ledger.dot").rfind("digraph", 0) == 0);
  std::ifstream in(dir / "peers/p3.dump");
  auto result = verify_dump(read_dump(in));
  CHECK(result.valid);
  CHECK(result.records == sim.peer(3).ledger().history().size());
  std::filesystem::remove_all(dir);
}

TEST_CASE("topologies")
{
  for (auto [topo, width] : {std::pair{Topology::Line, 0}, std::pair{Topology::Grid, 3}}) {
    auto s = small(2);
    s.entities = 9;
    s.topology = topo;
    s.grid_width = static_cast<std::size_t>(width);
    s.duration = 180;
    s.publish_until = 130;
    s.liveness_grace = 60;
    Simulation sim(s);
    CHECK(sim.network().link_count() == (topo == Topology::Line ? 8u : 12u));
    sim.run();
    CAPTURE(to_string(topo));
    CHECK(sim.liveness_violations() == 0);
    CHECK(sim.honest_sets_identical());
  }
}

TEST_CASE("adversaries in a small run")
{
  SUBCASE("forged notifications are caught and fetch nothing")
  {
    auto s = small(4);
    s.adversaries.push_back({AdversaryKind::NotifForger, 0, 2.0, 0, 0.0, std::nullopt});
    Simulation sim(s);
    sim.run();
    CHECK(sim.metrics().security.size() > 100);
    for (auto i : sim.honest())
      CHECK(sim.peer(i).stats().fetch_giveups == 0);
    CHECK(sim.liveness_violations() == 0);
  }
  SUBCASE("colluders below the threshold")
  {
    auto s = small(4);
    s.entities = 9;
    s.adversaries.push_back({AdversaryKind::Colluders, 0, 1.0, 2, 20.0, 8u});
    Simulation sim(s);
    sim.run();
    REQUIRE(sim.invalid_record());
    CHECK(sim.honest_invalid_confirmations() == 0);
    CHECK_FALSE(sim.observer_confirmed_invalid());
    for (auto i : sim.honest())
      CHECK(sim.peer(i).ledger().rejection(*sim.invalid_record()) == RejectReason::AppRejected);
  }
  SUBCASE("colluders at the threshold")
  {
    auto s = small(4);
    s.entities = 9;
    s.adversaries.push_back({AdversaryKind::Colluders, 0, 1.0, 3, 20.0, 8u});
    Simulation sim(s);
    sim.run();
    CHECK(sim.honest_invalid_confirmations() == 0);
    CHECK(sim.observer_confirmed_invalid());
  }
  SUBCASE("lazy peer")
  {
    auto s = small(4);
    s.adversaries.push_back({AdversaryKind::Lazy, 0, 1.0, 0, 0.0, std::nullopt});
    Simulation sim(s);
    sim.run();
    // Lazy records only get in where the approved records still looked young.
    const auto published = sim.peer(0).stats().published;
    CHECK(published > 50);
    for (auto i : sim.honest()) {
      std::size_t stored = 0;
      for (const auto& r : sim.peer(i).ledger().history())
        stored += r->generator() == EntityId("p0");
      CHECK(stored * 4 < published);
    }
    CHECK(sim.liveness_violations() == 0);
  }
}

TEST_CASE("invalid configurations")
{
  auto s = small();
  s.scheme = "rot13";
  CHECK_THROWS_AS(Simulation{s}, ConfigInvalid);
  s = small();
  s.entities = 2;
  CHECK_THROWS_AS(Simulation{s}, ConfigInvalid);
}
