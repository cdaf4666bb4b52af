#include "../support/world.hpp"

#include "dledger/ledger/export.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dledger;
using dledger::testing::World;

namespace {

struct Result
{
  int code = -1;
  std::string out;
};

Result cli(const std::string& args)
{
  std::string cmd = std::string(DLEDGER_CLI) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  while (auto n = fread(buf, 1, sizeof buf, p))
    r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const std::filesystem::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir
{
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
    : path(std::filesystem::temp_directory_path() / name)
  {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

const char* kTiny = R"(name: tiny
seed: 4
duration: 60
entities: 5
lambda: 0.3
w_confirm: 3
w_contribution: 2
link: {latency: 0.05, jitter: 0.01}
publish_until: 45
liveness_grace: 30
)";

} // namespace

TEST_CASE("cli oracle")
{
  auto r = cli("oracle 50 20 2 10 0.2");
  CHECK(r.code == 0);
  CHECK(r.out.find("C_pred           4.0000") != std::string::npos);
  CHECK(r.out.find("A_pred           25.2109") != std::string::npos);
  CHECK(r.out.find("t_confirm_bound  10.0844") != std::string::npos);

  r = cli("oracle 17 1 2 1 1");
  CHECK(r.code == 0);
  CHECK(r.out.find("A_pred           1.0000") != std::string::npos);

  CHECK(cli("oracle 5 6 2 1 1").code == 2);
  CHECK(cli("oracle 5 3").code == 2);
}

TEST_CASE("cli usage errors")
{
  CHECK(cli("").code == 2);
  CHECK(cli("frobnicate").code == 2);
  auto r = cli("run /nonexistent/scenario.yaml");
  CHECK(r.code == 2);
  CHECK(r.out.find("cannot read scenario file") != std::string::npos);
  CHECK(cli("verify /nonexistent/ledger.dump").code == 2);

  TempDir dir("dledger_cli_bad");
  std::ofstream(dir.path / "bad.yaml") << "entities: 2\n";
  CHECK(cli("run " + (dir.path / "bad.yaml").string()).code == 2);
  std::ofstream(dir.path / "ok.yaml") << kTiny;
  CHECK(cli("run " + (dir.path / "ok.yaml").string() + " --format xml").code == 2);
}

TEST_CASE("cli run is reproducible and its dump verifies")
{
  TempDir dir("dledger_cli_run");
  const auto scenario = dir.path / "tiny.yaml";
  std::ofstream(scenario) << kTiny;
  auto a = cli("run " + scenario.string() + " --seed 9 --out-dir " + (dir.path / "a").string());
  auto b = cli("run " + scenario.string() + " --seed 9 --out-dir " + (dir.path / "b").string());
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.out.find("seed 9") != std::string::npos);
  for (const char* f : {"samples.csv", "records.csv", "links.csv", "summary.csv", "ledger.dot", "ledger.dump"})
    CHECK(slurp(dir.path / "a" / f) == slurp(dir.path / "b" / f));

  auto only_dot = cli("run " + scenario.string() + " --format dot --out-dir " + (dir.path / "c").string());
  CHECK(only_dot.code == 0);
  CHECK(std::filesystem::exists(dir.path / "c" / "ledger.dot"));
  CHECK_FALSE(std::filesystem::exists(dir.path / "c" / "samples.csv"));

  auto v = cli("verify " + (dir.path / "a" / "ledger.dump").string());
  CHECK(v.code == 0);
  CHECK(v.out.rfind("valid", 0) == 0);
}

TEST_CASE("cli verify reports the first bad record")
{
  World w(3);
  auto L = w.ledger(World::config(2, 1));
  std::mt19937_64 rng(21);
  auto dag = w.random_dag(20, rng);
  for (auto& r : dag)
    REQUIRE(L.admit(r, Arrival::Backfill, 1).verdict.is_accepted());
  auto header = header_for(L, Bytes{1, 2, 3, 4}, 5);
  TempDir dir("dledger_cli_verify");

  auto write = [&](const std::string& file, const std::vector<std::shared_ptr<const Record>>& recs) {
    std::ofstream out(dir.path / file);
    write_dump(out, header, recs);
    return (dir.path / file).string();
  };

  SUBCASE("untampered")
  {
    auto r = cli("verify " + write("ok.dump", L.history()));
    CHECK(r.code == 0);
    CHECK(r.out == "valid (23 records)\n");
  }
  SUBCASE("flipped payload byte")
  {
    auto path = write("flip.dump", L.history());
    std::stringstream in(slurp(path));
    std::string text = in.str();
    const auto& victim = *dag[7];
    auto body = to_hex(victim.content.payload.body);
    auto line_start = text.find(to_hex(encode_record(victim)));
    REQUIRE(line_start != std::string::npos);
    auto pos = text.find(body, line_start);
    REQUIRE(pos != std::string::npos);
    text[pos] = text[pos] == '0' ? '1' : '0';
    std::ofstream(path) << text;
    auto r = cli("verify " + path);
    CHECK(r.code == 1);
    CHECK(r.out.find(victim.name.to_uri()) != std::string::npos);
    CHECK(r.out.find("DigestMismatch") != std::string::npos);
  }
  SUBCASE("self approval")
  {
    auto hist = L.history();
    auto own = dag.back();
    auto idx = static_cast<std::size_t>(std::stoi(own->generator().str().substr(1)));
    auto other = std::find_if(dag.begin(), dag.end(), [&](auto& r) { return r->generator() != own->generator(); });
    auto bad = w.make(idx, {own->name, (*other)->name});
    hist.push_back(bad);
    auto r = cli("verify " + write("self.dump", hist));
    CHECK(r.code == 1);
    CHECK(r.out.find(bad->name.to_uri()) != std::string::npos);
    CHECK(r.out.find("SelfApproval") != std::string::npos);
  }
}
