// Link-state routing model: per-router cost database, hop-delayed flooding
// of cost changes, and shortest-path-first next-hop computation.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "famtar/core_model.hpp"

namespace famtar {

struct LinkRecord {
  std::uint32_t cost = 0;
  bool up = true;
  std::uint64_t version = 0;

  friend bool operator==(const LinkRecord&, const LinkRecord&) = default;
};

/// One router's view of every directed link.
class LinkStateDb {
 public:
  LinkStateDb() = default;
  explicit LinkStateDb(const Topology& topo);

  const LinkRecord& at(DirLinkId dl) const { return records_.at(dl); }
  std::size_t size() const { return records_.size(); }

  /// Applies a flooded record; false (and no change) when it is not newer
  /// than the stored one.
  bool apply(DirLinkId dl, const LinkRecord& rec);

  /// Local origination: bumps the version, stores the record and returns
  /// what has to be flooded.
  LinkRecord originate(DirLinkId dl, std::uint32_t cost, bool up);

 private:
  std::vector<LinkRecord> records_;
};

struct Route {
  IfaceIndex iface = 0;
  NodeId next_hop = kNoNode;
  Address gateway = 0;
  std::uint64_t cost = 0;

  friend bool operator==(const Route&, const Route&) = default;
};

/// Per-destination first hops; unreachable destinations have no entry.
class RoutingTable {
 public:
  RoutingTable() = default;
  explicit RoutingTable(std::size_t node_count) : routes_(node_count) {}

  const Route* find(NodeId dest) const {
    return dest < routes_.size() && routes_[dest] ? &*routes_[dest] : nullptr;
  }
  void set(NodeId dest, Route r) { routes_.at(dest) = r; }
  std::size_t size() const { return routes_.size(); }

  /// "time_us,router,dest,iface,next_hop,cost" rows.
  std::string to_csv(const Topology& topo, NodeId router, SimTime at) const;

  friend bool operator==(const RoutingTable&, const RoutingTable&) = default;

 private:
  std::vector<std::optional<Route>> routes_;
};

/// Dijkstra over `db` from `source`. Hosts are reachable as destinations but
/// never used as transit. Ties on path cost go to the lowest next-hop node
/// id, then to the lowest interface index.
RoutingTable spf(const Topology& topo, const LinkStateDb& db, NodeId source);

struct RoutingConfig {
  SimTime flood_hop_delay = millis(10);
  SimTime spf_delay = millis(20);
  std::map<NodeId, SimTime> spf_delay_override;

  SimTime spf_delay_for(NodeId router) const {
    auto it = spf_delay_override.find(router);
    return it == spf_delay_override.end() ? spf_delay : it->second;
  }
};

struct FloodDelivery {
  NodeId router = kNoNode;
  SimTime at{0};

  friend bool operator==(const FloodDelivery&, const FloodDelivery&) = default;
};

/// Router-only BFS hop counts from `origin` over links that are physically up.
/// Unreached routers get -1.
std::vector<int> flood_hop_counts(const Topology& topo, const std::vector<bool>& link_up, NodeId origin);

/// Delivery schedule of a change originated at `origin`: every other
/// reachable router receives it at now + hops * hop_delay. The origin applies
/// the change itself (LinkStateDb::originate) and is not listed.
std::vector<FloodDelivery> flood_cost_change(const Topology& topo, const std::vector<bool>& link_up, NodeId origin,
                                             SimTime now, SimTime hop_delay);

}  // namespace famtar
