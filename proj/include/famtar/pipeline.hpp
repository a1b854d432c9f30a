// Per-router FAMTAR behaviour: the CheckFFT -> RouteFFT / LookupIPRoute ->
// AddFFT forwarding path, TTL-based loop resolution, the periodic load
// monitor and carrier-loss handling.
#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "famtar/core_model.hpp"
#include "famtar/event_log.hpp"
#include "famtar/fft.hpp"
#include "famtar/routing.hpp"

namespace famtar {

struct MonitorConfig {
  SimTime period = seconds(1);
  double congest_threshold = 0.90;
  double clear_threshold = 0.70;
  std::uint32_t high_cost = 10000;
  /// Router i ticks at i * stagger + k * period.
  SimTime stagger{0};

  /// Throws std::invalid_argument unless 0 < clear < congest <= 1.
  void validate() const;
};

struct FamtarConfig {
  bool enabled = true;
  MonitorConfig monitor;
  SimTime flow_timeout = seconds(10);
  SimTime block_duration = seconds(5);
  std::size_t fft_buckets = Fft::kDefaultBuckets;
  bool loop_resolution = true;
  bool symmetric_escalation = false;

  void validate() const;
};

struct Forward {
  IfaceIndex iface = 0;
  Address gateway = 0;
  friend bool operator==(const Forward&, const Forward&) = default;
};
struct DeliverLocal {
  friend bool operator==(const DeliverLocal&, const DeliverLocal&) = default;
};
struct Drop {
  DropReason reason = DropReason::unreachable;
  friend bool operator==(const Drop&, const Drop&) = default;
};
using Decision = std::variant<Forward, DeliverLocal, Drop>;

enum class LoopVerdict {
  keep,        ///< TTL matches the stored one
  raise_ttl,   ///< upstream path got shorter; stored TTL raised, route kept
  rewrite,     ///< TTL dropped: entry re-pinned from the routing table
  unpin,       ///< TTL dropped but the new egress is admission-blocked; entry removed
  unreachable, ///< TTL dropped and the routing table has no route; entry removed
};

/// Link-state change a router originated and the engine has to flood.
struct CostChange {
  DirLinkId dirlink = 0;
  LinkRecord record;
};

struct RouterInterface {
  LinkId link = 0;
  DirLinkId out = 0;
  NodeId peer = kNoNode;
  std::uint64_t capacity_bps = 0;
  std::uint32_t base_cost = 0;
  std::uint64_t window_bytes = 0; ///< bytes transmitted in the current monitor window
  bool congested = false;
  std::uint32_t original_cost = 0;
  bool up = true;
};

class Router {
 public:
  Router(const Topology& topo, NodeId id, const FamtarConfig& cfg);

  NodeId id() const { return id_; }

  /// Forwarding decision for a packet received on `ingress`. Decrements the
  /// TTL in place.
  Decision process_packet(Packet& pkt, IfaceIndex ingress, SimTime now, EventLog& log);

  /// FFT hit handling. `pkt.ttl` must already be decremented.
  Decision resolve_loop(const Packet& pkt, const FlowValue& entry, SimTime now, EventLog& log,
                        LoopVerdict* verdict = nullptr);

  /// Evaluates every interface's load over the elapsed window, emits cost
  /// escalations/restorations and resets the byte counters.
  std::vector<CostChange> monitor_tick(SimTime now, EventLog& log);

  void count_transmitted(IfaceIndex iface, std::uint32_t bytes) { ifaces_.at(iface).window_bytes += bytes; }

  std::vector<CostChange> on_link_down(IfaceIndex iface, SimTime now, EventLog& log);
  std::vector<CostChange> on_link_up(IfaceIndex iface, SimTime now, EventLog& log);

  LinkStateDb& db() { return db_; }
  const LinkStateDb& db() const { return db_; }
  const RoutingTable& table() const { return table_; }
  void install(RoutingTable table) { table_ = std::move(table); }

  Fft& fft() { return fft_; }
  const Fft& fft() const { return fft_; }
  const std::vector<RouterInterface>& interfaces() const { return ifaces_; }
  const FamtarConfig& config() const { return cfg_; }

 private:
  Decision route_and_pin(const Packet& pkt, NodeId dest, SimTime now, EventLog& log);
  void originate(std::vector<CostChange>& out, DirLinkId dl, std::uint32_t cost, bool up);

  const Topology* topo_;
  NodeId id_;
  FamtarConfig cfg_;
  Fft fft_;
  LinkStateDb db_;
  RoutingTable table_;
  std::vector<RouterInterface> ifaces_;
};

}  // namespace famtar
