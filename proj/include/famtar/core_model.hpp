// Shared domain types: flow identifiers, per-flow records, packets and the
// network topology.
#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace famtar {

/// Simulation clock: integer microseconds since run start.
using SimTime = std::chrono::microseconds;

constexpr SimTime seconds(double s) { return SimTime{static_cast<std::int64_t>(s * 1e6 + (s >= 0 ? 0.5 : -0.5))}; }
constexpr SimTime millis(std::int64_t ms) { return SimTime{ms * 1000}; }
constexpr double to_seconds(SimTime t) { return static_cast<double>(t.count()) / 1e6; }

using Address = std::uint32_t;
using NodeId = std::uint32_t;
using LinkId = std::uint32_t;
/// Directed link record: 2 * link + (0 for a->b, 1 for b->a).
using DirLinkId = std::uint32_t;
using IfaceIndex = std::uint8_t;

inline constexpr NodeId kNoNode = ~NodeId{0};

/// Parses dotted-quad notation; throws std::invalid_argument on malformed input.
Address parse_address(std::string_view text);
std::string format_address(Address addr);

struct FlowKey {
  Address src_addr = 0;
  Address dst_addr = 0;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  std::uint8_t ip_prot = 0;

  friend bool operator==(const FlowKey&, const FlowKey&) = default;
  friend auto operator<=>(const FlowKey&, const FlowKey&) = default;

  /// Wire layout: the five fields packed big-endian, 13 bytes.
  std::array<std::uint8_t, 13> serialize() const;
};

inline constexpr std::size_t kFlowKeyBytes = 13;   // 104 bits
inline constexpr std::size_t kFlowValueBytes = 10; // 80 bits

/// Validates bit widths; throws std::out_of_range when a field does not fit.
FlowKey make_flow_key(std::uint64_t src_addr, std::uint64_t dst_addr, std::uint64_t src_port,
                      std::uint64_t dst_port, std::uint64_t ip_prot);

/// Per-flow FFT record. `ts` keeps full SimTime resolution; only the
/// footprint accounting uses the 32-bit logical width.
struct FlowValue {
  SimTime ts{0};
  IfaceIndex port = 0;
  Address gateway = 0;
  std::uint8_t ttl = 0;

  friend bool operator==(const FlowValue&, const FlowValue&) = default;
};

/// Logical bytes per stored flow (key + value).
constexpr std::size_t flow_entry_footprint() { return kFlowKeyBytes + kFlowValueBytes; }

struct Packet {
  FlowKey key;
  std::uint32_t size = 0;    ///< wire bytes, headers included
  std::uint32_t payload = 0; ///< application bytes, used for bitrate metrics
  std::uint8_t ttl = 0;
  SimTime created_at{0};
  std::uint64_t flow_seq = 0;
  bool is_first_of_flow = false; ///< generator-side marker; routers never read it
  std::uint32_t flow_id = 0;
  std::uint64_t uid = 0;
  std::vector<NodeId> path; ///< visited nodes, filled only when tracing is on
};

enum class NodeKind { router, host };

struct Interface {
  LinkId link = 0;
  NodeId peer = kNoNode;
  DirLinkId out = 0;
};

struct Node {
  NodeId id = 0;
  std::string name;
  NodeKind kind = NodeKind::router;
  Address addr = 0;
  std::vector<Interface> ifaces;
};

struct Link {
  LinkId id = 0;
  NodeId a = kNoNode;
  NodeId b = kNoNode;
  std::uint64_t capacity_bps = 0;
  SimTime prop_delay{0};
  std::uint32_t base_cost = 0;
  std::uint32_t queue_capacity = 0;
};

class Topology {
 public:
  NodeId add_node(std::string name, NodeKind kind, Address addr);
  LinkId add_link(NodeId a, NodeId b, std::uint64_t capacity_bps, SimTime prop_delay,
                  std::uint32_t base_cost, std::uint32_t queue_capacity);

  /// Throws std::invalid_argument unless the graph is connected, capacities
  /// and costs are positive, and every host has exactly one link.
  void validate() const;

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Link>& links() const { return links_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  const Link& link(LinkId id) const { return links_.at(id); }
  std::size_t dirlink_count() const { return links_.size() * 2; }

  std::optional<NodeId> find(std::string_view name) const;
  std::optional<NodeId> find_by_address(Address addr) const;
  std::optional<LinkId> find_link(NodeId a, NodeId b) const;

  static DirLinkId dirlink(LinkId link, bool reverse) { return link * 2 + (reverse ? 1 : 0); }
  static LinkId link_of(DirLinkId dl) { return dl / 2; }
  static DirLinkId reverse_of(DirLinkId dl) { return dl ^ 1u; }
  NodeId dir_source(DirLinkId dl) const;
  NodeId dir_target(DirLinkId dl) const;
  /// Interface index at `node` for `link`; throws if not adjacent.
  IfaceIndex iface_of(NodeId node, LinkId link) const;

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::unordered_map<Address, NodeId> by_addr_;
};

}  // namespace famtar

template <>
struct std::hash<famtar::FlowKey> {
  std::size_t operator()(const famtar::FlowKey& k) const noexcept;
};
