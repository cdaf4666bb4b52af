#include "dledger/sim/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace dledger::sim {

std::string to_string(Topology t)
{
  switch (t) {
  case Topology::FullMesh: return "full-mesh";
  case Topology::Line: return "line";
  case Topology::Grid: return "grid";
  case Topology::Edges: return "edges";
  }
  return "?";
}

std::string to_string(AdversaryKind k)
{
  switch (k) {
  case AdversaryKind::Idle: return "idle";
  case AdversaryKind::Spammer: return "spammer";
  case AdversaryKind::Lazy: return "lazy";
  case AdversaryKind::NotifForger: return "notif_forger";
  case AdversaryKind::Colluders: return "colluders";
  }
  return "?";
}

std::uint32_t Scenario::effective_w_contribution() const
{
  return w_contribution.value_or(std::max<std::uint32_t>(1, w_confirm / 4));
}

void Scenario::validate() const
{
  auto fail = [](const std::string& m) { throw ConfigInvalid(m); };
  if (n < 2)
    fail("n must be at least 2");
  if (entities < n + 1)
    fail("need at least n+1 entities");
  if (!(duration > 0))
    fail("duration must be positive");
  if (!(lambda > 0))
    fail("lambda must be positive");
  if (w_confirm == 0)
    fail("w_confirm must be positive");
  const auto wc = effective_w_contribution();
  if (w_confirm == 1 ? wc != 1 : (wc == 0 || wc >= w_confirm))
    fail("need 0 < w_contribution < w_confirm");
  if (latency < 0 || jitter < 0)
    fail("latency and jitter must be non-negative");
  if (loss < 0 || loss >= 1)
    fail("loss must be in [0, 1)");
  if (!(sample_interval > 0))
    fail("sample_interval must be positive");
  if (sync_interval < 0 || maintenance_interval < 0)
    fail("intervals must be non-negative");
  if (payload_bytes > 8 * 1024)
    fail("payload_bytes too large");
  if (topology == Topology::Grid && grid_width == 0)
    fail("grid topology needs grid_width");
  if (topology == Topology::Edges) {
    if (edges.empty())
      fail("edges topology needs an edge list");
    for (auto [a, b] : edges)
      if (a >= entities || b >= entities || a == b)
        fail("bad edge");
  }
  std::vector<std::pair<double, double>> windows;
  for (const auto& p : partitions) {
    if (!(p.from < p.to))
      fail("partition needs from < to");
    for (auto [f, t] : windows)
      if (p.from < t && f < p.to)
        fail("partition windows overlap");
    windows.emplace_back(p.from, p.to);
    std::set<std::size_t> seen;
    for (const auto& g : p.groups)
      for (auto i : g)
        if (i >= entities || !seen.insert(i).second)
          fail("bad partition group member");
  }
  std::set<std::size_t> used;
  auto claim = [&](std::size_t i) {
    if (i >= entities)
      fail("adversary entity out of range");
    if (!used.insert(i).second)
      fail("entity used by two adversaries");
  };
  for (const auto& a : adversaries) {
    if (!(a.rate > 0))
      fail("adversary rate must be positive");
    claim(a.entity);
    if (a.kind == AdversaryKind::Colluders) {
      if (a.k == 0)
        fail("colluders need k > 0");
      for (std::size_t i = 1; i <= a.k; ++i)
        claim(a.entity + i);
      if (a.observer)
        claim(*a.observer);
    }
  }
  if (entities - used.size() < n + 1)
    fail("too few honest entities");
}

namespace {

template <class T>
T get(const YAML::Node& node, const char* key, T fallback)
{
  if (auto v = node[key])
    return v.as<T>();
  return fallback;
}

Topology parse_topology(const std::string& s)
{
  if (s == "full-mesh")
    return Topology::FullMesh;
  if (s == "line")
    return Topology::Line;
  if (s == "grid")
    return Topology::Grid;
  if (s == "edges")
    return Topology::Edges;
  throw ConfigInvalid("unknown topology " + s);
}

AdversaryKind parse_kind(const std::string& s)
{
  for (auto k : {AdversaryKind::Idle, AdversaryKind::Spammer, AdversaryKind::Lazy,
                 AdversaryKind::NotifForger, AdversaryKind::Colluders})
    if (to_string(k) == s)
      return k;
  throw ConfigInvalid("unknown adversary kind " + s);
}

void check_keys(const YAML::Node& node, std::initializer_list<const char*> allowed, const char* where)
{
  for (const auto& kv : node) {
    auto key = kv.first.as<std::string>();
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ConfigInvalid(std::string("unknown key '") + key + "' in " + where);
  }
}

} // namespace

Scenario parse_scenario(const std::string& text)
{
  Scenario s;
  try {
    auto root = YAML::Load(text);
    if (!root.IsMap())
      throw ConfigInvalid("scenario must be a mapping");
    check_keys(root,
               {"name", "seed", "duration", "entities", "topology", "grid_width", "edges", "lambda", "n",
                "w_confirm", "w_contribution", "count_self_indirect", "link", "sync_interval",
                "sample_interval", "notif_hops", "publish_until", "liveness_grace", "unconfirmed_ttl",
                "archive_depth", "maintenance_interval", "scheme", "payload_bytes", "partitions",
                "adversaries"},
               "scenario");
    s.name = get(root, "name", s.name);
    s.seed = get(root, "seed", s.seed);
    s.duration = get(root, "duration", s.duration);
    s.entities = get(root, "entities", s.entities);
    if (auto t = root["topology"])
      s.topology = parse_topology(t.as<std::string>());
    s.grid_width = get(root, "grid_width", s.grid_width);
    if (auto e = root["edges"])
      for (const auto& pair : e) {
        if (!pair.IsSequence() || pair.size() != 2)
          throw ConfigInvalid("edges entries must be [a, b]");
        s.edges.emplace_back(pair[0].as<std::size_t>(), pair[1].as<std::size_t>());
      }
    s.lambda = get(root, "lambda", s.lambda);
    s.n = get(root, "n", s.n);
    s.w_confirm = get(root, "w_confirm", s.w_confirm);
    if (auto wc = root["w_contribution"])
      s.w_contribution = wc.as<std::uint32_t>();
    s.count_self_indirect = get(root, "count_self_indirect", s.count_self_indirect);
    if (auto link = root["link"]) {
      check_keys(link, {"latency", "jitter", "loss"}, "link");
      s.latency = get(link, "latency", s.latency);
      s.jitter = get(link, "jitter", s.jitter);
      s.loss = get(link, "loss", s.loss);
    }
    s.sync_interval = get(root, "sync_interval", s.sync_interval);
    s.sample_interval = get(root, "sample_interval", s.sample_interval);
    s.notif_hops = get(root, "notif_hops", s.notif_hops);
    if (auto p = root["publish_until"])
      s.publish_until = p.as<double>();
    s.liveness_grace = get(root, "liveness_grace", s.liveness_grace);
    s.unconfirmed_ttl = get(root, "unconfirmed_ttl", s.unconfirmed_ttl);
    if (auto a = root["archive_depth"])
      s.archive_depth = a.as<std::size_t>();
    s.maintenance_interval = get(root, "maintenance_interval", s.maintenance_interval);
    s.scheme = get(root, "scheme", s.scheme);
    s.payload_bytes = get(root, "payload_bytes", s.payload_bytes);
    if (auto parts = root["partitions"])
      for (const auto& p : parts) {
        check_keys(p, {"groups", "from", "to"}, "partition");
        PartitionSpec ps;
        ps.groups = p["groups"].as<std::vector<std::vector<std::size_t>>>();
        ps.from = p["from"].as<double>();
        ps.to = p["to"].as<double>();
        s.partitions.push_back(std::move(ps));
      }
    if (auto advs = root["adversaries"])
      for (const auto& a : advs) {
        check_keys(a, {"kind", "entity", "rate", "k", "at", "observer"}, "adversary");
        AdversarySpec as;
        as.kind = parse_kind(a["kind"].as<std::string>());
        as.entity = a["entity"].as<std::size_t>();
        as.rate = get(a, "rate", as.rate);
        as.k = get(a, "k", as.k);
        as.at = get(a, "at", as.at);
        if (auto o = a["observer"])
          as.observer = o.as<std::size_t>();
        s.adversaries.push_back(as);
      }
  } catch (const YAML::Exception& e) {
    throw ConfigInvalid(std::string("scenario parse error: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigInvalid("cannot read scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

} // namespace dledger::sim
