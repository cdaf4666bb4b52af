// dledger: run scenarios, verify ledger dumps, print analytic predictions.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.

#include "dledger/ledger/export.hpp"
#include "dledger/sim/oracle.hpp"
#include "dledger/sim/simulation.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kUsage = 2;

void configure_logging()
{
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("DLEDGER_LOG")) {
    auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off")
      std::cerr << "ignoring unknown DLEDGER_LOG level " << env << "\n";
    else
      spdlog::set_level(level);
  }
  spdlog::set_pattern("[%l] %v");
}

int cmd_run(const std::string& path, const std::optional<std::uint64_t>& seed, const std::string& out_dir,
            const std::vector<std::string>& formats)
{
  using namespace dledger::sim;
  std::set<OutputFormat> wanted;
  for (const auto& f : formats) {
    if (f == "csv")
      wanted.insert(OutputFormat::Csv);
    else if (f == "dot")
      wanted.insert(OutputFormat::Dot);
    else if (f == "dump")
      wanted.insert(OutputFormat::Dump);
  }
  if (wanted.empty())
    wanted = {OutputFormat::Csv, OutputFormat::Dot, OutputFormat::Dump};

  Scenario scenario;
  try {
    scenario = load_scenario(path);
    if (seed)
      scenario.seed = *seed;
  } catch (const ConfigInvalid& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    Simulation sim(scenario);
    sim.run();
    sim.write_outputs(out_dir, wanted);
    std::cout << fmt::format("scenario {} seed {} ({} entities, {:.0f} s)\n", scenario.name, scenario.seed,
                             scenario.entities, scenario.duration);
    for (const auto& [key, value] : sim.metrics().summary)
      std::cout << fmt::format("  {:<28} {}\n", key, value);
    std::cout << "outputs in " << out_dir << "\n";
  } catch (const ConfigInvalid& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}

int cmd_verify(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << path << "\n";
    return kUsage;
  }
  dledger::Dump dump;
  try {
    dump = dledger::read_dump(in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  auto result = dledger::verify_dump(dump);
  if (result.valid) {
    std::cout << "valid (" << result.records << " records)\n";
    return kOk;
  }
  std::cout << "invalid at line " << result.line;
  if (result.name)
    std::cout << " record " << result.name->to_uri();
  std::cout << ": " << result.reason << "\n";
  return kInvalid;
}

int cmd_oracle(std::size_t entities, std::uint32_t w, std::size_t n, double lambda, double T)
{
  using namespace dledger::sim;
  if (n < 2) {
    std::cerr << "error: n must be at least 2\n";
    return kUsage;
  }
  try {
    const double a = predicted_approvals(w, entities);
    std::cout << fmt::format("C_pred           {:.4f}\n", predicted_tailing(n, lambda, T));
    std::cout << fmt::format("A_pred           {:.4f}\n", a);
    std::cout << fmt::format("t_confirm_bound  {:.4f}\n", confirmation_bound(entities, w, n, T));
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}

} // namespace

int main(int argc, char** argv)
{
  configure_logging();

  CLI::App app{"DAG ledger simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::vector<std::string> formats;
  auto* run = app.add_subcommand("run", "run a scenario and write metrics, DOT and dumps");
  run->add_option("scenario", scenario_path, "scenario file")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
  run->add_option("--format", formats, "csv, dot or dump (repeatable; default all)")
    ->check(CLI::IsMember({"csv", "dot", "dump"}));

  std::string dump_path;
  auto* verify = app.add_subcommand("verify", "replay a ledger dump from genesis");
  verify->add_option("dump", dump_path, "dump file")->required();

  std::size_t entities = 0;
  std::uint32_t w = 0;
  std::size_t n = 2;
  double lambda = 0;
  double T = 0;
  auto* oracle = app.add_subcommand("oracle", "print analytic predictions");
  oracle->add_option("N", entities, "entities")->required();
  oracle->add_option("W", w, "W_confirm")->required();
  oracle->add_option("n", n, "approvals per record")->required();
  oracle->add_option("lambda", lambda, "system-wide record rate (1/s)")->required();
  oracle->add_option("T", T, "propagation delay (s)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (run->parsed())
    return cmd_run(scenario_path, seed, out_dir, formats);
  if (verify->parsed())
    return cmd_verify(dump_path);
  return cmd_oracle(entities, w, n, lambda, T);
}
