// Small topology and packet builders shared by the test binaries.
#pragma once

#include <string>
#include <vector>

#include "famtar/core_model.hpp"

namespace famtar::testing {

inline constexpr std::uint64_t kTenMbit = 10'000'000;
inline constexpr std::uint64_t kHundredMbit = 100'000'000;

inline Address addr_of(NodeId id) { return parse_address("10.0.0.1") + id; }

inline NodeId add(Topology& t, const std::string& name, NodeKind kind = NodeKind::router) {
  return t.add_node(name, kind, addr_of(static_cast<NodeId>(t.nodes().size())));
}

inline LinkId connect(Topology& t, NodeId a, NodeId b, std::uint32_t cost = 10, std::uint64_t cap = kTenMbit,
                      SimTime delay = millis(1), std::uint32_t queue = 100) {
  return t.add_link(a, b, cap, delay, cost, queue);
}

/// H1 - R1 - ... - Rn - H2, nodes added in that order.
inline Topology line(int routers, SimTime delay = millis(1)) {
  Topology t;
  const NodeId h1 = add(t, "H1", NodeKind::host);
  std::vector<NodeId> rs;
  for (int i = 1; i <= routers; ++i) rs.push_back(add(t, "R" + std::to_string(i)));
  const NodeId h2 = add(t, "H2", NodeKind::host);
  connect(t, h1, rs.front(), 10, kHundredMbit, delay);
  for (std::size_t i = 1; i < rs.size(); ++i) connect(t, rs[i - 1], rs[i], 10, kTenMbit, delay);
  connect(t, rs.back(), h2, 10, kHundredMbit, delay);
  return t;
}

inline Packet packet(const FlowKey& key, std::uint8_t ttl, std::uint32_t size = 1000) {
  Packet p;
  p.key = key;
  p.ttl = ttl;
  p.size = size;
  p.payload = size;
  return p;
}

}  // namespace famtar::testing
