#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dledger::sim {

class ConfigInvalid : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class Topology
{
  FullMesh,
  Line,
  Grid,
  Edges,
};

struct PartitionSpec
{
  std::vector<std::vector<std::size_t>> groups;
  double from = 0.0;
  double to = 0.0;
};

enum class AdversaryKind
{
  Idle,        // entity present but silent (baseline stand-in)
  Spammer,
  Lazy,
  NotifForger,
  Colluders,
};

struct AdversarySpec
{
  AdversaryKind kind = AdversaryKind::Idle;
  std::size_t entity = 0; // Colluders: the beneficiary; colluders follow it
  double rate = 1.0;      // records or forged notifications per second
  std::size_t k = 0;      // Colluders only
  double at = 0.0;        // Colluders: when the invalid record is published
  /// Colluders: index of a passive peer that ignores every policy.
  std::optional<std::size_t> observer;
};

/// Everything one simulation run needs. Entities are named p0..p(N-1).
struct Scenario
{
  std::string name = "scenario";
  std::uint64_t seed = 1;
  double duration = 100.0;
  std::size_t entities = 10;
  Topology topology = Topology::FullMesh;
  std::size_t grid_width = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  double lambda = 0.2; // per-entity records per second
  std::size_t n = 2;
  std::uint32_t w_confirm = 20;
  std::optional<std::uint32_t> w_contribution;
  bool count_self_indirect = false;

  double latency = 0.05;
  double jitter = 0.0;
  double loss = 0.0;

  double sync_interval = 10.0;
  double sample_interval = 10.0;
  int notif_hops = 0; // 0: network diameter
  /// Honest workload stops here; defaults to the full duration.
  std::optional<double> publish_until;
  /// Records published later than duration - liveness_grace are not held to liveness.
  double liveness_grace = 60.0;

  double unconfirmed_ttl = std::numeric_limits<double>::infinity();
  std::optional<std::size_t> archive_depth;
  double maintenance_interval = 0.0;

  std::string scheme = "hmac-test";
  std::size_t payload_bytes = 32;

  std::vector<PartitionSpec> partitions;
  std::vector<AdversarySpec> adversaries;

  std::uint32_t effective_w_contribution() const;
  double effective_publish_until() const { return publish_until.value_or(duration); }

  /// Throws ConfigInvalid.
  void validate() const;
};

std::string to_string(Topology t);
std::string to_string(AdversaryKind k);

/// YAML scenario document; unknown keys are rejected. Throws ConfigInvalid.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

} // namespace dledger::sim
