// Deterministic discrete-event core: a single time-ordered event queue,
// drop-tail output queues with serialisation and propagation delay, carrier
// failure injection and link-state flooding between routers.
#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "famtar/core_model.hpp"
#include "famtar/event_log.hpp"
#include "famtar/metrics.hpp"
#include "famtar/pipeline.hpp"
#include "famtar/routing.hpp"
#include "famtar/traffic.hpp"

namespace famtar {

struct FailureSpec {
  LinkId link = 0;
  SimTime down{0};
  std::optional<SimTime> up;
};

struct SimConfig {
  Topology topology;
  RoutingConfig routing;
  FamtarConfig famtar;
  WorkloadSpec workload;
  std::vector<FailureSpec> failures;
  SimTime duration{0};
  bool trace_paths = false;
  bool record_routes = false;
};

struct RouteSnapshot {
  SimTime at{0};
  NodeId router = kNoNode;
  RoutingTable table;
};

enum class EnqueueResult { queued, dropped_queue_full, dropped_link_down };

namespace event {
struct PacketArrival {
  NodeId node;
  IfaceIndex ingress;
  std::uint64_t epoch;
  Packet pkt;
};
struct TransmitComplete {
  DirLinkId dirlink;
  std::uint64_t epoch;
};
struct MonitorTick {
  NodeId router;
};
struct LsaDelivery {
  NodeId router;
  DirLinkId dirlink;
  LinkRecord record;
};
struct SpfInstall {
  NodeId router;
  RoutingTable table;
};
struct FlowStart {
  std::uint32_t flow;
};
struct FlowEmit {
  std::uint32_t flow;
  std::uint64_t seq;
};
struct LinkDown {
  LinkId link;
};
struct LinkUp {
  LinkId link;
};
struct ScenarioEnd {};

using Payload = std::variant<PacketArrival, TransmitComplete, MonitorTick, LsaDelivery, SpfInstall, FlowStart,
                             FlowEmit, LinkDown, LinkUp, ScenarioEnd>;
}  // namespace event

/// Min-ordered by (time, insertion sequence): equal timestamps run in the
/// order they were scheduled.
class EventQueue {
 public:
  struct Entry {
    SimTime at;
    std::uint64_t seq;
    event::Payload payload;
  };

  /// Throws std::logic_error when `at` lies before the last popped event.
  void schedule(SimTime at, event::Payload payload);
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  Entry pop();
  SimTime now() const { return now_; }

 private:
  std::vector<Entry> heap_;
  std::uint64_t next_seq_ = 0;
  SimTime now_{0};
};

class Engine {
 public:
  /// Validates the configuration; throws std::invalid_argument when it is
  /// malformed.
  explicit Engine(SimConfig cfg);
  ~Engine();

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  MetricsReport run();

  /// Hands a routed packet to the output queue of `iface` at `node`.
  EnqueueResult enqueue_for_transmit(NodeId node, IfaceIndex iface, Packet pkt, SimTime now);

  /// Schedules carrier loss on `link` at t_down and optionally recovery.
  void inject_link_failure(LinkId link, SimTime t_down, std::optional<SimTime> t_up = std::nullopt);

  const Topology& topology() const { return cfg_.topology; }
  const Router* router(NodeId id) const { return routers_.at(id).get(); }
  const EventLog& log() const { return log_; }
  const std::vector<RouteSnapshot>& route_history() const { return routes_; }
  std::size_t queue_length(NodeId node, IfaceIndex iface) const;

 private:
  struct Port {
    std::deque<Packet> queue; ///< front is the packet being serialised
    bool busy = false;
    std::uint64_t carry = 0;  ///< sub-microsecond serialisation remainder
  };

  void handle(SimTime now, event::PacketArrival& ev);
  void handle(SimTime now, event::TransmitComplete& ev);
  void handle(SimTime now, event::MonitorTick& ev);
  void handle(SimTime now, event::LsaDelivery& ev);
  void handle(SimTime now, event::SpfInstall& ev);
  void handle(SimTime now, event::FlowStart& ev);
  void handle(SimTime now, event::FlowEmit& ev);
  void handle(SimTime now, event::LinkDown& ev);
  void handle(SimTime now, event::LinkUp& ev);

  void start_transmission(DirLinkId dl, SimTime now);
  void flood(NodeId origin, const std::vector<CostChange>& changes, SimTime now);
  void schedule_spf(NodeId router, SimTime now);
  void drop(const Packet& pkt, DropReason reason, NodeId at, SimTime now);
  void deliver(const Packet& pkt, SimTime now);
  DirLinkId out_dirlink(NodeId node, IfaceIndex iface) const;

  SimConfig cfg_;
  EventQueue events_;
  EventLog log_;
  std::unique_ptr<MetricsCollector> metrics_;
  std::vector<std::unique_ptr<Router>> routers_; ///< null for hosts
  std::vector<Port> ports_;                      ///< indexed by DirLinkId
  std::vector<bool> link_up_;
  std::vector<std::uint64_t> link_epoch_;
  std::vector<FlowKey> flow_keys_;
  std::vector<std::optional<std::uint64_t>> flow_packets_;
  std::vector<RouteSnapshot> routes_;
  std::uint64_t on_wire_ = 0;
  std::uint64_t next_uid_ = 0;
  bool ran_ = false;
};

}  // namespace famtar
