#include "famtar/routing.hpp"

#include <deque>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace famtar {

LinkStateDb::LinkStateDb(const Topology& topo) : records_(topo.dirlink_count()) {
  for (const auto& l : topo.links()) {
    records_[Topology::dirlink(l.id, false)] = LinkRecord{l.base_cost, true, 0};
    records_[Topology::dirlink(l.id, true)] = LinkRecord{l.base_cost, true, 0};
  }
}

bool LinkStateDb::apply(DirLinkId dl, const LinkRecord& rec) {
  auto& cur = records_.at(dl);
  if (rec.version <= cur.version) return false;
  cur = rec;
  return true;
}

LinkRecord LinkStateDb::originate(DirLinkId dl, std::uint32_t cost, bool up) {
  if (cost == 0) throw std::invalid_argument("link cost must be positive");
  auto& cur = records_.at(dl);
  cur = LinkRecord{cost, up, cur.version + 1};
  return cur;
}

std::string RoutingTable::to_csv(const Topology& topo, NodeId router, SimTime at) const {
  std::ostringstream out;
  for (NodeId d = 0; d < routes_.size(); ++d) {
    if (!routes_[d]) continue;
    const auto& r = *routes_[d];
    out << at.count() << ',' << topo.node(router).name << ',' << topo.node(d).name << ',' << unsigned{r.iface}
        << ',' << topo.node(r.next_hop).name << ',' << r.cost << '\n';
  }
  return out.str();
}

RoutingTable spf(const Topology& topo, const LinkStateDb& db, NodeId source) {
  const auto n = topo.nodes().size();
  constexpr auto kInf = std::numeric_limits<std::uint64_t>::max();
  // Label: (cost, first-hop node, first-hop interface). Lexicographic
  // minimisation composes along paths because all costs are positive.
  using Label = std::tuple<std::uint64_t, NodeId, unsigned>;
  std::vector<Label> best(n, Label{kInf, kNoNode, 0});
  std::vector<bool> done(n, false);
  std::set<std::pair<Label, NodeId>> frontier;

  best[source] = Label{0, kNoNode, 0};
  frontier.insert({best[source], source});

  while (!frontier.empty()) {
    const auto [label, u] = *frontier.begin();
    frontier.erase(frontier.begin());
    if (done[u]) continue;
    done[u] = true;
    const auto& node = topo.node(u);
    if (u != source && node.kind == NodeKind::host) continue;
    for (std::size_t i = 0; i < node.ifaces.size(); ++i) {
      const auto& itf = node.ifaces[i];
      const auto& rec = db.at(itf.out);
      if (!rec.up) continue;
      const NodeId v = itf.peer;
      if (done[v]) continue;
      Label cand = u == source ? Label{rec.cost, v, static_cast<unsigned>(i)}
                               : Label{std::get<0>(label) + rec.cost, std::get<1>(label), std::get<2>(label)};
      if (cand < best[v]) {
        best[v] = cand;
        frontier.insert({cand, v});
      }
    }
  }

  RoutingTable table(n);
  for (NodeId d = 0; d < n; ++d) {
    if (d == source || std::get<0>(best[d]) == kInf) continue;
    const auto hop = std::get<1>(best[d]);
    table.set(d, Route{static_cast<IfaceIndex>(std::get<2>(best[d])), hop, topo.node(hop).addr, std::get<0>(best[d])});
  }
  return table;
}

std::vector<int> flood_hop_counts(const Topology& topo, const std::vector<bool>& link_up, NodeId origin) {
  std::vector<int> hops(topo.nodes().size(), -1);
  hops[origin] = 0;
  std::deque<NodeId> frontier{origin};
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (const auto& itf : topo.node(u).ifaces) {
      if (!link_up[itf.link]) continue;
      const NodeId v = itf.peer;
      if (hops[v] >= 0 || topo.node(v).kind != NodeKind::router) continue;
      hops[v] = hops[u] + 1;
      frontier.push_back(v);
    }
  }
  return hops;
}

std::vector<FloodDelivery> flood_cost_change(const Topology& topo, const std::vector<bool>& link_up, NodeId origin,
                                             SimTime now, SimTime hop_delay) {
  const auto hops = flood_hop_counts(topo, link_up, origin);
  std::vector<FloodDelivery> out;
  for (NodeId r = 0; r < hops.size(); ++r) {
    if (r == origin || hops[r] < 0) continue;
    out.push_back(FloodDelivery{r, now + hop_delay * hops[r]});
  }
  return out;
}

}  // namespace famtar
