#pragma once

#include "dledger/net/name.hpp"
#include "dledger/net/scheduler.hpp"
#include "dledger/record/bytes.hpp"

#include <array>
#include <deque>
#include <iosfwd>
#include <list>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace dledger::net {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;

struct Interest
{
  Name name;
  std::shared_ptr<const Bytes> parameter; // may be null
  std::uint64_t nonce = 0;
  int hop_budget = 32;

  ByteView parameter_bytes() const { return parameter ? ByteView(*parameter) : ByteView(); }
};

struct DataPacket
{
  Name name;
  std::shared_ptr<const Bytes> content;
  Bytes signature;
};

/// Application attached to a node's local face.
class NetApp
{
public:
  virtual ~NetApp() = default;
  virtual void on_interest(const Interest& interest) = 0;
  virtual void on_data(const DataPacket& data) = 0;
  /// One of the node's links came back up.
  virtual void on_link_up() {}
};

struct NetworkConfig
{
  double pit_lifetime = 4.0;
  double dead_nonce_lifetime = 6.0;
  std::size_t cs_capacity = 1024;
  std::uint64_t seed = 1;
};

struct LinkParams
{
  double latency = 0.01;
  double jitter = 0.0; // extra delay drawn uniformly from [0, jitter)
  double loss = 0.0;
};

struct NodeStats
{
  std::uint64_t interests_in = 0;
  std::uint64_t interests_out = 0;
  std::uint64_t data_in = 0;
  std::uint64_t data_out = 0;
  std::uint64_t cs_hits = 0;
  std::uint64_t aggregated = 0;
  std::uint64_t duplicate_drops = 0;
  std::uint64_t no_route_drops = 0;
  std::uint64_t unsolicited_data = 0;
  std::uint64_t app_interests = 0;
  std::uint64_t app_data = 0;
};

struct LinkStats
{
  // Index 0: a -> b, index 1: b -> a.
  std::array<std::uint64_t, 2> interests{};
  std::array<std::uint64_t, 2> data{};
  std::uint64_t dropped_down = 0;
  std::uint64_t dropped_loss = 0;

  std::uint64_t transmissions() const { return interests[0] + interests[1] + data[0] + data[1]; }
};

/// Simulated content-centric network: per-node PIT, content store and FIB,
/// point-to-point links with latency, loss and up/down state.
///
/// Face 0 of every node is its application face; faces 1.. are links.
/// Unicast prefixes follow static shortest paths (ties go to the lowest node
/// index), recomputed whenever link state changes. Multicast prefixes are
/// flooded with nonce-based duplicate suppression, bounded by the hop budget.
class Network
{
public:
  Network(Scheduler& scheduler, NetworkConfig config = {});

  NodeId add_node(std::string label, NetApp* app = nullptr);
  void attach_app(NodeId node, NetApp* app);
  LinkId add_link(NodeId a, NodeId b, LinkParams params = {});

  /// Interests under `prefix` reach this node's application.
  void register_prefix(NodeId node, const Name& prefix);
  /// Marks `prefix` as flooded network-wide.
  void add_multicast_prefix(const Name& prefix);

  /// Rebuilds every unicast FIB entry from the current link state.
  void compute_routes();

  void express_interest(NodeId node, Interest interest);
  void put_data(NodeId node, DataPacket data);

  std::uint64_t new_nonce() { return rng_(); }

  void set_link_up(LinkId link, bool up);
  void schedule_link_state(LinkId link, double t, bool up);

  /// Links joining different groups are down during [from, to). Nodes not
  /// listed form one more group. Throws std::invalid_argument when the window
  /// overlaps an earlier one.
  void set_partition(const std::vector<std::vector<NodeId>>& groups, double from, double to);

  /// Lines "<time> <node> <event> <name>[ <peer>]".
  void set_trace(std::ostream* out) { trace_ = out; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }
  const std::string& label(NodeId node) const { return nodes_.at(node).label; }
  NodeId find_node(const std::string& label) const;
  std::pair<NodeId, NodeId> endpoints(LinkId link) const;
  bool link_up(LinkId link) const { return links_.at(link).up; }
  std::vector<NodeId> neighbors(NodeId node) const;

  /// Longest shortest-path hop count over all links, ignoring link state.
  std::size_t diameter() const;
  /// Hop distance over links that are currently up; SIZE_MAX when unreachable.
  std::size_t distance(NodeId a, NodeId b) const;

  const NodeStats& stats(NodeId node) const { return nodes_.at(node).stats; }
  const LinkStats& link_stats(LinkId link) const { return links_.at(link).stats; }
  /// Transmissions from `from` to `to` over the link joining them.
  std::uint64_t interests_sent(NodeId from, NodeId to) const;

  bool cs_contains(NodeId node, const Name& name) const;
  std::size_t pit_size(NodeId node) const { return nodes_.at(node).pit.size(); }

  Scheduler& scheduler() { return scheduler_; }
  const NetworkConfig& config() const { return config_; }

private:
  struct Face
  {
    LinkId link = 0;
    int side = 0; // 0: this node is endpoint a
  };

  struct PitEntry
  {
    std::vector<std::pair<int, std::uint64_t>> downstream; // face, last nonce
    double expiry = 0.0;
  };

  struct Node
  {
    std::string label;
    NetApp* app = nullptr;
    std::vector<Face> faces; // faces[0] unused (application)
    std::unordered_map<std::string, PitEntry> pit;
    double next_pit_sweep = 0.0;
    std::unordered_map<std::uint64_t, double> seen_nonces;
    std::deque<std::pair<double, std::uint64_t>> nonce_order;
    std::list<DataPacket> cs_lru;
    std::unordered_map<std::string, std::list<DataPacket>::iterator> cs;
    std::unordered_map<std::string, std::vector<int>> fib;
    std::set<std::string> app_prefixes;
    NodeStats stats;
  };

  struct Link
  {
    NodeId a = 0;
    NodeId b = 0;
    int face_a = 0;
    int face_b = 0;
    LinkParams params;
    bool up = true;
    std::array<double, 2> last_arrival{};
    LinkStats stats;
  };

  struct Window
  {
    double from;
    double to;
  };

  void on_interest(NodeId node, int in_face, Interest interest);
  void on_data(NodeId node, int in_face, DataPacket data);
  std::vector<int> route(const Node& n, const Name& name, int in_face) const;
  void send_interest(NodeId node, int face, Interest interest);
  void send_data(NodeId node, int face, DataPacket data);
  template <class Deliver>
  void transmit(NodeId node, int face, bool is_interest, Deliver deliver);
  void cs_insert(Node& n, const DataPacket& data);
  void sweep(Node& n);
  void apply_link_states(const std::vector<std::pair<LinkId, bool>>& changes);
  void trace(NodeId node, const char* event, const Name& name, const std::string& peer = {});
  NodeId peer_of(NodeId node, int face) const;

  Scheduler& scheduler_;
  NetworkConfig config_;
  std::mt19937_64 rng_;
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::set<std::string> multicast_;
  std::vector<Window> partitions_;
  std::ostream* trace_ = nullptr;
};

} // namespace dledger::net
