// Independent routing oracle and random link-state networks, shared by the
// routing unit tests and the acceptance run.
#pragma once

#include <algorithm>
#include <limits>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "famtar/routing.hpp"
#include "support.hpp"

namespace famtar::testing {

// Independent oracle: enumerate every simple path and keep the lexicographic
// minimum of (cost, first-hop node, first-hop iface). Hosts only as endpoints.
struct Best {
  std::uint64_t cost = std::numeric_limits<std::uint64_t>::max();
  NodeId hop = kNoNode;
  unsigned iface = 0;
  bool found = false;
};

inline void enumerate(const Topology& t, const LinkStateDb& db, NodeId src, NodeId u, NodeId dst, std::vector<bool>& seen,
               std::uint64_t cost, NodeId hop, unsigned iface, Best& best) {
  if (u == dst) {
    if (!best.found || std::tie(cost, hop, iface) < std::tie(best.cost, best.hop, best.iface))
      best = Best{cost, hop, iface, true};
    return;
  }
  if (u != src && t.node(u).kind == NodeKind::host) return;
  const auto& ifs = t.node(u).ifaces;
  for (unsigned i = 0; i < ifs.size(); ++i) {
    const auto& rec = db.at(ifs[i].out);
    if (!rec.up || seen[ifs[i].peer]) continue;
    seen[ifs[i].peer] = true;
    enumerate(t, db, src, ifs[i].peer, dst, seen, cost + rec.cost, u == src ? ifs[i].peer : hop, u == src ? i : iface,
              best);
    seen[ifs[i].peer] = false;
  }
}

inline Best brute_force(const Topology& t, const LinkStateDb& db, NodeId src, NodeId dst) {
  std::vector<bool> seen(t.nodes().size(), false);
  seen[src] = true;
  Best best;
  enumerate(t, db, src, src, dst, seen, 0, kNoNode, 0, best);
  return best;
}

struct RandomNet {
  Topology topo;
  LinkStateDb db;
};

inline RandomNet random_net(std::mt19937_64& rng) {
  Topology t;
  const int routers = 2 + static_cast<int>(rng() % 5);  // 2..6 nodes in total with hosts
  const int hosts = static_cast<int>(rng() % std::min(3, 7 - routers));
  std::vector<NodeId> rs;
  for (int i = 0; i < routers; ++i) rs.push_back(add(t, "R" + std::to_string(i)));
  auto cost = [&rng] { return static_cast<std::uint32_t>(1 + rng() % 30); };
  // Spanning tree first so the graph is connected, then extra edges
  // (parallel links allowed).
  for (int i = 1; i < routers; ++i) connect(t, rs[rng() % i], rs[i], cost());
  const int extra = static_cast<int>(rng() % 6);
  for (int e = 0; e < extra; ++e) {
    const auto a = rs[rng() % routers];
    const auto b = rs[rng() % routers];
    if (a != b) connect(t, a, b, cost());
  }
  for (int h = 0; h < hosts; ++h) connect(t, add(t, "H" + std::to_string(h), NodeKind::host), rs[rng() % routers], cost());
  LinkStateDb db(t);
  for (DirLinkId dl = 0; dl < t.dirlink_count(); ++dl) {
    const auto roll = rng() % 10;
    if (roll == 0) db.originate(dl, db.at(dl).cost, false);
    else if (roll == 1) db.originate(dl, 10000, true);
  }
  return {std::move(t), std::move(db)};
}

}  // namespace famtar::testing
