#include "dledger/net/network.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <stdexcept>

namespace dledger::net {

Network::Network(Scheduler& scheduler, NetworkConfig config)
  : scheduler_(scheduler)
  , config_(config)
  , rng_(config.seed)
{
}

NodeId Network::add_node(std::string label, NetApp* app)
{
  Node n;
  n.label = std::move(label);
  n.app = app;
  n.faces.resize(1);
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

void Network::attach_app(NodeId node, NetApp* app)
{
  nodes_.at(node).app = app;
}

LinkId Network::add_link(NodeId a, NodeId b, LinkParams params)
{
  if (a == b || a >= nodes_.size() || b >= nodes_.size())
    throw std::invalid_argument("bad link endpoints");
  if (params.latency < 0 || params.jitter < 0 || params.loss < 0 || params.loss >= 1)
    throw std::invalid_argument("bad link parameters");
  Link l;
  l.a = a;
  l.b = b;
  l.params = params;
  const auto id = static_cast<LinkId>(links_.size());
  l.face_a = static_cast<int>(nodes_[a].faces.size());
  nodes_[a].faces.push_back({id, 0});
  l.face_b = static_cast<int>(nodes_[b].faces.size());
  nodes_[b].faces.push_back({id, 1});
  links_.push_back(l);
  return id;
}

void Network::register_prefix(NodeId node, const Name& prefix)
{
  nodes_.at(node).app_prefixes.insert(prefix.uri());
}

void Network::add_multicast_prefix(const Name& prefix)
{
  multicast_.insert(prefix.uri());
}

NodeId Network::find_node(const std::string& label) const
{
  for (NodeId i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].label == label)
      return i;
  throw std::out_of_range("unknown node " + label);
}

std::pair<NodeId, NodeId> Network::endpoints(LinkId link) const
{
  const auto& l = links_.at(link);
  return {l.a, l.b};
}

NodeId Network::peer_of(NodeId node, int face) const
{
  const auto& f = nodes_[node].faces[face];
  const auto& l = links_[f.link];
  return f.side == 0 ? l.b : l.a;
}

std::vector<NodeId> Network::neighbors(NodeId node) const
{
  std::vector<NodeId> out;
  for (std::size_t f = 1; f < nodes_.at(node).faces.size(); ++f)
    out.push_back(peer_of(node, static_cast<int>(f)));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

template <class Adjacent>
std::vector<std::size_t> bfs(std::size_t n, std::size_t source, Adjacent adjacent)
{
  std::vector<std::size_t> dist(n, kUnreachable);
  std::queue<std::size_t> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    adjacent(u, [&](std::size_t v) {
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        q.push(v);
      }
    });
  }
  return dist;
}

} // namespace

std::size_t Network::distance(NodeId a, NodeId b) const
{
  auto dist = bfs(nodes_.size(), a, [&](std::size_t u, auto visit) {
    for (std::size_t f = 1; f < nodes_[u].faces.size(); ++f)
      if (links_[nodes_[u].faces[f].link].up)
        visit(peer_of(static_cast<NodeId>(u), static_cast<int>(f)));
  });
  return dist.at(b);
}

std::size_t Network::diameter() const
{
  std::size_t best = 0;
  for (std::size_t s = 0; s < nodes_.size(); ++s) {
    auto dist = bfs(nodes_.size(), s, [&](std::size_t u, auto visit) {
      for (std::size_t f = 1; f < nodes_[u].faces.size(); ++f)
        visit(peer_of(static_cast<NodeId>(u), static_cast<int>(f)));
    });
    for (auto d : dist)
      if (d != kUnreachable)
        best = std::max(best, d);
  }
  return best;
}

void Network::compute_routes()
{
  for (auto& n : nodes_)
    n.fib.clear();
  for (NodeId producer = 0; producer < nodes_.size(); ++producer) {
    const auto& prefixes = nodes_[producer].app_prefixes;
    std::vector<std::string> unicast;
    for (const auto& p : prefixes)
      if (!multicast_.contains(p))
        unicast.push_back(p);
    if (unicast.empty())
      continue;
    auto dist = bfs(nodes_.size(), producer, [&](std::size_t u, auto visit) {
      for (std::size_t f = 1; f < nodes_[u].faces.size(); ++f)
        if (links_[nodes_[u].faces[f].link].up)
          visit(peer_of(static_cast<NodeId>(u), static_cast<int>(f)));
    });
    for (NodeId u = 0; u < nodes_.size(); ++u) {
      int face = -1;
      if (u == producer) {
        face = 0;
      } else if (dist[u] != kUnreachable) {
        NodeId best = 0;
        for (std::size_t f = 1; f < nodes_[u].faces.size(); ++f) {
          if (!links_[nodes_[u].faces[f].link].up)
            continue;
          auto v = peer_of(u, static_cast<int>(f));
          if (dist[v] + 1 != dist[u])
            continue;
          if (face < 0 || v < best) {
            face = static_cast<int>(f);
            best = v;
          }
        }
      }
      if (face < 0)
        continue;
      for (const auto& p : unicast)
        nodes_[u].fib[p].push_back(face);
    }
  }
}

std::vector<int> Network::route(const Node& n, const Name& name, int in_face) const
{
  for (std::size_t k = name.size(); k >= 1; --k) {
    const auto p = name.prefix(k).uri();
    if (auto it = n.fib.find(p); it != n.fib.end()) {
      std::vector<int> out;
      for (int f : it->second)
        if (f != in_face)
          out.push_back(f);
      if (!out.empty())
        return out;
    }
    if (multicast_.contains(p)) {
      std::vector<int> out;
      if (in_face != 0 && n.app && n.app_prefixes.contains(p))
        out.push_back(0);
      for (std::size_t f = 1; f < n.faces.size(); ++f)
        if (static_cast<int>(f) != in_face && links_[n.faces[f].link].up)
          out.push_back(static_cast<int>(f));
      return out;
    }
  }
  return {};
}

void Network::trace(NodeId node, const char* event, const Name& name, const std::string& peer)
{
  if (!trace_)
    return;
  char t[32];
  std::snprintf(t, sizeof t, "%.6f", scheduler_.now());
  *trace_ << t << ' ' << nodes_[node].label << ' ' << event << ' ' << name.uri();
  if (!peer.empty())
    *trace_ << ' ' << peer;
  *trace_ << '\n';
}

void Network::sweep(Node& n)
{
  const double now = scheduler_.now();
  while (!n.nonce_order.empty() && n.nonce_order.front().first <= now) {
    auto [t, nonce] = n.nonce_order.front();
    n.nonce_order.pop_front();
    auto it = n.seen_nonces.find(nonce);
    if (it != n.seen_nonces.end() && it->second <= now)
      n.seen_nonces.erase(it);
  }
  if (now >= n.next_pit_sweep) {
    std::erase_if(n.pit, [&](const auto& kv) { return kv.second.expiry <= now; });
    n.next_pit_sweep = now + config_.pit_lifetime;
  }
}

void Network::express_interest(NodeId node, Interest interest)
{
  on_interest(node, 0, std::move(interest));
}

void Network::put_data(NodeId node, DataPacket data)
{
  on_data(node, 0, std::move(data));
}

void Network::on_interest(NodeId node, int in_face, Interest interest)
{
  auto& n = nodes_[node];
  const double now = scheduler_.now();
  sweep(n);
  if (in_face != 0) {
    ++n.stats.interests_in;
    trace(node, "interest_in", interest.name, nodes_[peer_of(node, in_face)].label);
  }

  if (n.seen_nonces.contains(interest.nonce)) {
    ++n.stats.duplicate_drops;
    trace(node, "dup_drop", interest.name);
    return;
  }
  const double nonce_expiry = now + config_.dead_nonce_lifetime;
  n.seen_nonces[interest.nonce] = nonce_expiry;
  n.nonce_order.emplace_back(nonce_expiry, interest.nonce);

  if (auto it = n.cs.find(interest.name.uri()); it != n.cs.end()) {
    ++n.stats.cs_hits;
    trace(node, "cs_hit", interest.name);
    n.cs_lru.splice(n.cs_lru.begin(), n.cs_lru, it->second);
    send_data(node, in_face, *it->second);
    return;
  }

  auto pit = n.pit.find(interest.name.uri());
  if (pit != n.pit.end() && pit->second.expiry <= now) {
    n.pit.erase(pit);
    pit = n.pit.end();
  }
  if (pit != n.pit.end()) {
    auto& down = pit->second.downstream;
    auto same = std::find_if(down.begin(), down.end(), [&](auto& d) { return d.first == in_face; });
    if (same == down.end()) {
      down.emplace_back(in_face, interest.nonce);
      ++n.stats.aggregated;
      trace(node, "aggregate", interest.name);
      return;
    }
    // A retransmission (new nonce, same downstream) goes upstream again.
    same->second = interest.nonce;
    pit->second.expiry = now + config_.pit_lifetime;
    trace(node, "retransmit", interest.name);
  } else {
    PitEntry entry;
    entry.downstream.emplace_back(in_face, interest.nonce);
    entry.expiry = now + config_.pit_lifetime;
    n.pit.emplace(interest.name.uri(), std::move(entry));
  }

  auto faces = route(n, interest.name, in_face);
  bool sent = false;
  for (int f : faces) {
    if (f == 0) {
      ++n.stats.app_interests;
      sent = true;
      scheduler_.schedule(0.0, [this, node, interest] {
        if (auto* app = nodes_[node].app)
          app->on_interest(interest);
      });
    } else if (interest.hop_budget > 0) {
      Interest out = interest;
      out.hop_budget -= 1;
      send_interest(node, f, std::move(out));
      sent = true;
    }
  }
  if (!sent && faces.empty()) {
    ++n.stats.no_route_drops;
    trace(node, "no_route", interest.name);
  }
}

void Network::on_data(NodeId node, int in_face, DataPacket data)
{
  auto& n = nodes_[node];
  const double now = scheduler_.now();
  sweep(n);
  if (in_face != 0) {
    ++n.stats.data_in;
    trace(node, "data_in", data.name, nodes_[peer_of(node, in_face)].label);
  }
  auto pit = n.pit.find(data.name.uri());
  if (pit == n.pit.end() || pit->second.expiry <= now) {
    if (pit != n.pit.end())
      n.pit.erase(pit);
    ++n.stats.unsolicited_data;
    trace(node, "unsolicited", data.name);
    return;
  }
  auto downstream = std::move(pit->second.downstream);
  n.pit.erase(pit);
  cs_insert(n, data);
  for (auto& [face, nonce] : downstream)
    if (face != in_face)
      send_data(node, face, data);
}

void Network::cs_insert(Node& n, const DataPacket& data)
{
  if (config_.cs_capacity == 0)
    return;
  const auto& key = data.name.uri();
  if (auto it = n.cs.find(key); it != n.cs.end()) {
    n.cs_lru.splice(n.cs_lru.begin(), n.cs_lru, it->second);
    return;
  }
  n.cs_lru.push_front(data);
  n.cs.emplace(key, n.cs_lru.begin());
  if (n.cs.size() > config_.cs_capacity) {
    n.cs.erase(n.cs_lru.back().name.uri());
    n.cs_lru.pop_back();
  }
}

bool Network::cs_contains(NodeId node, const Name& name) const
{
  return nodes_.at(node).cs.contains(name.uri());
}

template <class Deliver>
void Network::transmit(NodeId node, int face, bool is_interest, Deliver deliver)
{
  const auto& f = nodes_[node].faces[face];
  auto& l = links_[f.link];
  if (!l.up) {
    ++l.stats.dropped_down;
    return;
  }
  (is_interest ? l.stats.interests : l.stats.data)[f.side] += 1;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (l.params.loss > 0 && u(rng_) < l.params.loss) {
    ++l.stats.dropped_loss;
    return;
  }
  double delay = l.params.latency;
  if (l.params.jitter > 0)
    delay += l.params.jitter * u(rng_);
  double arrival = std::max(scheduler_.now() + delay, l.last_arrival[f.side]);
  l.last_arrival[f.side] = arrival;
  const NodeId to = f.side == 0 ? l.b : l.a;
  const int to_face = f.side == 0 ? l.face_b : l.face_a;
  const LinkId link = f.link;
  scheduler_.schedule_at(arrival, [this, link, to, to_face, deliver = std::move(deliver)]() mutable {
    if (!links_[link].up) {
      ++links_[link].stats.dropped_down;
      return;
    }
    deliver(to, to_face);
  });
}

void Network::send_interest(NodeId node, int face, Interest interest)
{
  ++nodes_[node].stats.interests_out;
  trace(node, "interest_out", interest.name, nodes_[peer_of(node, face)].label);
  transmit(node, face, true, [this, interest = std::move(interest)](NodeId to, int to_face) mutable {
    on_interest(to, to_face, std::move(interest));
  });
}

void Network::send_data(NodeId node, int face, DataPacket data)
{
  auto& n = nodes_[node];
  if (face == 0) {
    ++n.stats.app_data;
    scheduler_.schedule(0.0, [this, node, data = std::move(data)] {
      if (auto* app = nodes_[node].app)
        app->on_data(data);
    });
    return;
  }
  ++n.stats.data_out;
  trace(node, "data_out", data.name, nodes_[peer_of(node, face)].label);
  transmit(node, face, false, [this, data = std::move(data)](NodeId to, int to_face) mutable {
    on_data(to, to_face, std::move(data));
  });
}

std::uint64_t Network::interests_sent(NodeId from, NodeId to) const
{
  std::uint64_t total = 0;
  for (std::size_t f = 1; f < nodes_.at(from).faces.size(); ++f) {
    const auto& face = nodes_[from].faces[f];
    if (peer_of(from, static_cast<int>(f)) == to)
      total += links_[face.link].stats.interests[face.side];
  }
  return total;
}

void Network::apply_link_states(const std::vector<std::pair<LinkId, bool>>& changes)
{
  std::set<NodeId> revived;
  bool changed = false;
  for (auto [id, up] : changes) {
    auto& l = links_.at(id);
    if (l.up == up)
      continue;
    changed = true;
    l.up = up;
    if (up) {
      revived.insert(l.a);
      revived.insert(l.b);
    }
  }
  if (!changed)
    return;
  compute_routes();
  for (auto node : revived) {
    if (nodes_[node].app)
      scheduler_.schedule(0.0, [this, node] {
        if (auto* app = nodes_[node].app)
          app->on_link_up();
      });
  }
}

void Network::set_link_up(LinkId link, bool up)
{
  apply_link_states({{link, up}});
}

void Network::schedule_link_state(LinkId link, double t, bool up)
{
  scheduler_.schedule_at(t, [this, link, up] { set_link_up(link, up); });
}

void Network::set_partition(const std::vector<std::vector<NodeId>>& groups, double from, double to)
{
  if (!(from < to))
    throw std::invalid_argument("partition window must have from < to");
  for (const auto& w : partitions_)
    if (from < w.to && w.from < to)
      throw std::invalid_argument("partition windows overlap");

  const int unlisted = static_cast<int>(groups.size());
  std::vector<int> group(nodes_.size(), unlisted);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (auto node : groups[g]) {
      if (node >= nodes_.size())
        throw std::invalid_argument("partition names an unknown node");
      if (group[node] != unlisted)
        throw std::invalid_argument("node listed in two partition groups");
      group[node] = static_cast<int>(g);
    }
  partitions_.push_back({from, to});

  std::vector<LinkId> cut;
  for (LinkId i = 0; i < links_.size(); ++i)
    if (group[links_[i].a] != group[links_[i].b])
      cut.push_back(i);
  if (cut.empty())
    return;

  auto apply = [this, cut](bool up) {
    std::vector<std::pair<LinkId, bool>> changes;
    for (auto id : cut)
      changes.emplace_back(id, up);
    apply_link_states(changes);
  };
  scheduler_.schedule_at(from, [apply] { apply(false); });
  scheduler_.schedule_at(to, [apply] { apply(true); });
}

} // namespace dledger::net
