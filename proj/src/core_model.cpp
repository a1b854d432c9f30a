#include "famtar/core_model.hpp"

#include <charconv>
#include <deque>
#include <stdexcept>

namespace famtar {

Address parse_address(std::string_view text) {
  Address addr = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int octet = 0; octet < 4; ++octet) {
    unsigned value = 0;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc{} || value > 255 || next == p)
      throw std::invalid_argument("malformed address: " + std::string(text));
    addr = (addr << 8) | value;
    p = next;
    if (octet < 3) {
      if (p == end || *p != '.') throw std::invalid_argument("malformed address: " + std::string(text));
      ++p;
    }
  }
  if (p != end) throw std::invalid_argument("malformed address: " + std::string(text));
  return addr;
}

std::string format_address(Address addr) {
  return std::to_string(addr >> 24) + '.' + std::to_string((addr >> 16) & 0xff) + '.' +
         std::to_string((addr >> 8) & 0xff) + '.' + std::to_string(addr & 0xff);
}

std::array<std::uint8_t, 13> FlowKey::serialize() const {
  std::array<std::uint8_t, 13> out{};
  auto put = [&out](std::size_t at, std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out[at + i] = static_cast<std::uint8_t>(v >> (8 * (bytes - 1 - i)));
  };
  put(0, src_addr, 4);
  put(4, dst_addr, 4);
  put(8, src_port, 2);
  put(10, dst_port, 2);
  put(12, ip_prot, 1);
  return out;
}

FlowKey make_flow_key(std::uint64_t src_addr, std::uint64_t dst_addr, std::uint64_t src_port,
                      std::uint64_t dst_port, std::uint64_t ip_prot) {
  if (src_addr > 0xffffffffu || dst_addr > 0xffffffffu) throw std::out_of_range("address exceeds 32 bits");
  if (src_port > 0xffffu || dst_port > 0xffffu) throw std::out_of_range("port exceeds 16 bits");
  if (ip_prot > 0xffu) throw std::out_of_range("protocol exceeds 8 bits");
  return FlowKey{static_cast<Address>(src_addr), static_cast<Address>(dst_addr),
                 static_cast<std::uint16_t>(src_port), static_cast<std::uint16_t>(dst_port),
                 static_cast<std::uint8_t>(ip_prot)};
}

NodeId Topology::add_node(std::string name, NodeKind kind, Address addr) {
  if (find(name)) throw std::invalid_argument("duplicate node name: " + name);
  if (find_by_address(addr)) throw std::invalid_argument("duplicate address for node " + name);
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{id, std::move(name), kind, addr, {}});
  by_addr_.emplace(addr, id);
  return id;
}

LinkId Topology::add_link(NodeId a, NodeId b, std::uint64_t capacity_bps, SimTime prop_delay,
                          std::uint32_t base_cost, std::uint32_t queue_capacity) {
  if (a >= nodes_.size() || b >= nodes_.size()) throw std::invalid_argument("link endpoint does not exist");
  if (a == b) throw std::invalid_argument("self-loop link at " + nodes_[a].name);
  if (capacity_bps == 0) throw std::invalid_argument("link capacity must be positive");
  if (base_cost == 0) throw std::invalid_argument("link cost must be positive");
  if (queue_capacity == 0) throw std::invalid_argument("queue capacity must be positive");
  if (prop_delay.count() < 0) throw std::invalid_argument("negative propagation delay");
  if (nodes_[a].ifaces.size() >= 255 || nodes_[b].ifaces.size() >= 255)
    throw std::invalid_argument("interface index exceeds 8 bits");
  const auto id = static_cast<LinkId>(links_.size());
  links_.push_back(Link{id, a, b, capacity_bps, prop_delay, base_cost, queue_capacity});
  nodes_[a].ifaces.push_back(Interface{id, b, dirlink(id, false)});
  nodes_[b].ifaces.push_back(Interface{id, a, dirlink(id, true)});
  return id;
}

void Topology::validate() const {
  if (nodes_.empty()) throw std::invalid_argument("topology has no nodes");
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::host && n.ifaces.size() != 1)
      throw std::invalid_argument("host " + n.name + " must have exactly one link");
  }
  std::vector<bool> seen(nodes_.size(), false);
  std::deque<NodeId> frontier{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    for (const auto& itf : nodes_[u].ifaces) {
      if (!seen[itf.peer]) {
        seen[itf.peer] = true;
        ++reached;
        frontier.push_back(itf.peer);
      }
    }
  }
  if (reached != nodes_.size()) throw std::invalid_argument("topology is not connected");
}

std::optional<NodeId> Topology::find(std::string_view name) const {
  for (const auto& n : nodes_)
    if (n.name == name) return n.id;
  return std::nullopt;
}

std::optional<NodeId> Topology::find_by_address(Address addr) const {
  auto it = by_addr_.find(addr);
  if (it == by_addr_.end()) return std::nullopt;
  return it->second;
}

std::optional<LinkId> Topology::find_link(NodeId a, NodeId b) const {
  for (const auto& l : links_)
    if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) return l.id;
  return std::nullopt;
}

NodeId Topology::dir_source(DirLinkId dl) const {
  const auto& l = links_.at(link_of(dl));
  return (dl & 1u) ? l.b : l.a;
}

NodeId Topology::dir_target(DirLinkId dl) const {
  const auto& l = links_.at(link_of(dl));
  return (dl & 1u) ? l.a : l.b;
}

IfaceIndex Topology::iface_of(NodeId node, LinkId link) const {
  const auto& ifs = nodes_.at(node).ifaces;
  for (std::size_t i = 0; i < ifs.size(); ++i)
    if (ifs[i].link == link) return static_cast<IfaceIndex>(i);
  throw std::invalid_argument("node " + nodes_.at(node).name + " is not adjacent to link");
}

}  // namespace famtar

std::size_t std::hash<famtar::FlowKey>::operator()(const famtar::FlowKey& k) const noexcept {
  // FNV-1a over the packed 13-byte key.
  std::uint64_t h = 1469598103934665603ull;
  for (auto byte : k.serialize()) {
    h ^= byte;
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}
