#include "famtar/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace famtar {

namespace {

struct Later {
  bool operator()(const EventQueue::Entry& x, const EventQueue::Entry& y) const {
    return x.at != y.at ? x.at > y.at : x.seq > y.seq;
  }
};

}  // namespace

void EventQueue::schedule(SimTime at, event::Payload payload) {
  if (at < now_) throw std::logic_error("event scheduled in the past");
  heap_.push_back(Entry{at, next_seq_++, std::move(payload)});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
}

EventQueue::Entry EventQueue::pop() {
  std::pop_heap(heap_.begin(), heap_.end(), Later{});
  Entry e = std::move(heap_.back());
  heap_.pop_back();
  now_ = e.at;
  return e;
}

Engine::Engine(SimConfig cfg) : cfg_(std::move(cfg)) {
  const auto& topo = cfg_.topology;
  topo.validate();
  cfg_.famtar.validate();
  if (cfg_.duration.count() <= 0) throw std::invalid_argument("scenario duration must be positive");
  if (cfg_.routing.flood_hop_delay.count() < 0 || cfg_.routing.spf_delay.count() < 0)
    throw std::invalid_argument("routing delays must be non-negative");
  for (const auto& [node, delay] : cfg_.routing.spf_delay_override) {
    if (node >= topo.nodes().size() || topo.node(node).kind != NodeKind::router)
      throw std::invalid_argument("SPF delay override for a non-router");
    if (delay.count() < 0) throw std::invalid_argument("routing delays must be non-negative");
  }

  for (std::uint32_t i = 0; i < cfg_.workload.flows.size(); ++i) {
    const auto& f = cfg_.workload.flows[i];
    f.validate();
    const auto src = topo.find(f.src);
    const auto dst = topo.find(f.dst);
    if (!src || topo.node(*src).kind != NodeKind::host)
      throw std::invalid_argument("flow source '" + f.src + "' is not a host");
    if (!dst || topo.node(*dst).kind != NodeKind::host)
      throw std::invalid_argument("flow destination '" + f.dst + "' is not a host");
    if (*src == *dst) throw std::invalid_argument("flow source and destination coincide");
    flow_keys_.push_back(
        make_flow_key(topo.node(*src).addr, topo.node(*dst).addr, f.src_port, f.dst_port, f.protocol));
    flow_packets_.push_back(f.packet_count());
  }
  for (const auto& fl : cfg_.failures) {
    if (fl.link >= topo.links().size()) throw std::invalid_argument("failure on unknown link");
    if (fl.down.count() < 0 || (fl.up && *fl.up <= fl.down)) throw std::invalid_argument("bad failure timing");
  }

  metrics_ = std::make_unique<MetricsCollector>(topo, cfg_.workload, cfg_.duration, cfg_.trace_paths);
  for (std::uint32_t i = 0; i < flow_keys_.size(); ++i) metrics_->set_flow_key(i, flow_keys_[i]);
  for (const auto& n : topo.nodes())
    routers_.push_back(n.kind == NodeKind::router ? std::make_unique<Router>(topo, n.id, cfg_.famtar) : nullptr);
  ports_.resize(topo.dirlink_count());
  link_up_.assign(topo.links().size(), true);
  link_epoch_.assign(topo.links().size(), 0);

  events_.schedule(cfg_.duration, event::ScenarioEnd{});
  for (std::uint32_t i = 0; i < cfg_.workload.flows.size(); ++i)
    if (cfg_.workload.flows[i].start < cfg_.duration) events_.schedule(cfg_.workload.flows[i].start, event::FlowStart{i});
  if (cfg_.famtar.enabled) {
    std::int64_t k = 0;
    for (const auto& r : routers_) {
      if (!r) continue;
      const SimTime first = cfg_.famtar.monitor.stagger * k++;
      if (first < cfg_.duration) events_.schedule(first, event::MonitorTick{r->id()});
    }
  }
  for (const auto& fl : cfg_.failures) inject_link_failure(fl.link, fl.down, fl.up);
  if (cfg_.record_routes)
    for (const auto& r : routers_)
      if (r) routes_.push_back(RouteSnapshot{SimTime{0}, r->id(), r->table()});
}

Engine::~Engine() = default;

void Engine::inject_link_failure(LinkId link, SimTime t_down, std::optional<SimTime> t_up) {
  if (link >= cfg_.topology.links().size()) throw std::invalid_argument("failure on unknown link");
  events_.schedule(t_down, event::LinkDown{link});
  if (t_up) events_.schedule(*t_up, event::LinkUp{link});
}

MetricsReport Engine::run() {
  if (ran_) throw std::logic_error("engine already ran");
  ran_ = true;
  while (!events_.empty()) {
    auto entry = events_.pop();
    if (std::holds_alternative<event::ScenarioEnd>(entry.payload)) break;
    std::visit(
        [&](auto& ev) {
          if constexpr (!std::is_same_v<std::decay_t<decltype(ev)>, event::ScenarioEnd>) handle(entry.at, ev);
        },
        entry.payload);
  }
  std::uint64_t in_flight = on_wire_;
  for (const auto& p : ports_) in_flight += p.queue.size();
  return metrics_->finish(in_flight, log_);
}

DirLinkId Engine::out_dirlink(NodeId node, IfaceIndex iface) const {
  return cfg_.topology.node(node).ifaces.at(iface).out;
}

std::size_t Engine::queue_length(NodeId node, IfaceIndex iface) const {
  return ports_.at(out_dirlink(node, iface)).queue.size();
}

EnqueueResult Engine::enqueue_for_transmit(NodeId node, IfaceIndex iface, Packet pkt, SimTime now) {
  const DirLinkId dl = out_dirlink(node, iface);
  const LinkId link = Topology::link_of(dl);
  if (!link_up_[link]) {
    drop(pkt, DropReason::link_down, node, now);
    return EnqueueResult::dropped_link_down;
  }
  auto& port = ports_[dl];
  if (port.queue.size() >= cfg_.topology.link(link).queue_capacity) {
    drop(pkt, DropReason::queue_full, node, now);
    return EnqueueResult::dropped_queue_full;
  }
  port.queue.push_back(std::move(pkt));
  if (!port.busy) start_transmission(dl, now);
  return EnqueueResult::queued;
}

void Engine::start_transmission(DirLinkId dl, SimTime now) {
  auto& port = ports_[dl];
  const auto& link = cfg_.topology.link(Topology::link_of(dl));
  const std::uint64_t scaled = std::uint64_t{port.queue.front().size} * 8u * 1'000'000u + port.carry;
  const auto tx = static_cast<std::int64_t>(scaled / link.capacity_bps);
  port.carry = scaled % link.capacity_bps;
  port.busy = true;
  events_.schedule(now + SimTime{tx}, event::TransmitComplete{dl, link_epoch_[link.id]});
}

void Engine::handle(SimTime now, event::TransmitComplete& ev) {
  const LinkId link = Topology::link_of(ev.dirlink);
  if (ev.epoch != link_epoch_[link]) return;
  auto& port = ports_[ev.dirlink];
  Packet pkt = std::move(port.queue.front());
  port.queue.pop_front();
  port.busy = false;

  const auto& topo = cfg_.topology;
  const NodeId from = topo.dir_source(ev.dirlink);
  const NodeId to = topo.dir_target(ev.dirlink);
  if (routers_[from]) routers_[from]->count_transmitted(topo.iface_of(from, link), pkt.size);
  metrics_->on_transmitted(ev.dirlink, pkt.size, now);

  const IfaceIndex ingress = topo.iface_of(to, link);
  ++on_wire_;
  events_.schedule(now + topo.link(link).prop_delay, event::PacketArrival{to, ingress, ev.epoch, std::move(pkt)});
  if (!port.queue.empty()) start_transmission(ev.dirlink, now);
}

void Engine::handle(SimTime now, event::PacketArrival& ev) {
  --on_wire_;
  const auto& topo = cfg_.topology;
  const LinkId link = topo.node(ev.node).ifaces.at(ev.ingress).link;
  Packet& pkt = ev.pkt;
  if (ev.epoch != link_epoch_[link] || !link_up_[link]) {
    drop(pkt, DropReason::link_down, ev.node, now);
    return;
  }
  if (cfg_.trace_paths) pkt.path.push_back(ev.node);

  Router* r = routers_[ev.node].get();
  if (r == nullptr) {
    if (pkt.key.dst_addr == topo.node(ev.node).addr)
      deliver(pkt, now);
    else
      drop(pkt, DropReason::unreachable, ev.node, now);
    return;
  }
  const Decision d = r->process_packet(pkt, ev.ingress, now, log_);
  if (const auto* fwd = std::get_if<Forward>(&d)) {
    enqueue_for_transmit(ev.node, fwd->iface, std::move(pkt), now);
  } else if (std::holds_alternative<DeliverLocal>(d)) {
    deliver(pkt, now);
  } else {
    drop(pkt, std::get<Drop>(d).reason, ev.node, now);
  }
}

void Engine::handle(SimTime now, event::FlowStart& ev) {
  event::FlowEmit first{ev.flow, 0};
  handle(now, first);
}

void Engine::handle(SimTime now, event::FlowEmit& ev) {
  const auto& spec = cfg_.workload.flows[ev.flow];
  const auto& topo = cfg_.topology;
  const NodeId src = *topo.find_by_address(flow_keys_[ev.flow].src_addr);

  Packet pkt;
  pkt.key = flow_keys_[ev.flow];
  pkt.size = spec.packet_size;
  pkt.payload = spec.payload();
  pkt.ttl = spec.ttl_initial;
  pkt.created_at = now;
  pkt.flow_seq = ev.seq;
  pkt.is_first_of_flow = ev.seq == 0;
  pkt.flow_id = ev.flow;
  pkt.uid = next_uid_++;
  if (cfg_.trace_paths) pkt.path.push_back(src);
  metrics_->on_generated(pkt, now);
  enqueue_for_transmit(src, 0, std::move(pkt), now);

  const std::uint64_t next = ev.seq + 1;
  if (flow_packets_[ev.flow] && next >= *flow_packets_[ev.flow]) return;
  const SimTime at = spec.emission_time(next);
  if (spec.stop && at >= *spec.stop) return;
  if (at >= cfg_.duration) return;
  events_.schedule(at, event::FlowEmit{ev.flow, next});
}

void Engine::handle(SimTime now, event::MonitorTick& ev) {
  auto& r = *routers_[ev.router];
  const auto changes = r.monitor_tick(now, log_);
  if (!changes.empty()) flood(ev.router, changes, now);
  const SimTime next = now + cfg_.famtar.monitor.period;
  if (next < cfg_.duration) events_.schedule(next, event::MonitorTick{ev.router});
}

void Engine::flood(NodeId origin, const std::vector<CostChange>& changes, SimTime now) {
  // The origin's database already holds the change.
  schedule_spf(origin, now);
  const auto deliveries = flood_cost_change(cfg_.topology, link_up_, origin, now, cfg_.routing.flood_hop_delay);
  for (const auto& c : changes)
    for (const auto& d : deliveries) events_.schedule(d.at, event::LsaDelivery{d.router, c.dirlink, c.record});
}

void Engine::schedule_spf(NodeId router, SimTime now) {
  auto& r = *routers_[router];
  events_.schedule(now + cfg_.routing.spf_delay_for(router),
                   event::SpfInstall{router, spf(cfg_.topology, r.db(), router)});
}

void Engine::handle(SimTime now, event::LsaDelivery& ev) {
  auto& r = *routers_[ev.router];
  if (r.db().apply(ev.dirlink, ev.record)) schedule_spf(ev.router, now);
}

void Engine::handle(SimTime now, event::SpfInstall& ev) {
  auto& r = *routers_[ev.router];
  if (r.table() == ev.table) return;
  std::int64_t reachable = 0;
  for (NodeId d = 0; d < ev.table.size(); ++d) reachable += ev.table.find(d) != nullptr;
  log_.add(LogEvent{now, LogKind::route_install, ev.router, -1, 0, 0, reachable});
  if (cfg_.record_routes) routes_.push_back(RouteSnapshot{now, ev.router, ev.table});
  r.install(std::move(ev.table));
}

void Engine::handle(SimTime now, event::LinkDown& ev) {
  if (!link_up_[ev.link]) return;
  link_up_[ev.link] = false;
  ++link_epoch_[ev.link];
  const auto& topo = cfg_.topology;
  const auto& link = topo.link(ev.link);
  log_.add(LogEvent{now, LogKind::link_down, link.a, topo.iface_of(link.a, ev.link), 0, 0, ev.link});
  for (bool rev : {false, true}) {
    const DirLinkId dl = Topology::dirlink(ev.link, rev);
    auto& port = ports_[dl];
    const NodeId at = topo.dir_source(dl);
    while (!port.queue.empty()) {
      drop(port.queue.front(), DropReason::link_down, at, now);
      port.queue.pop_front();
    }
    port.busy = false;
  }
  for (NodeId end : {link.a, link.b}) {
    if (!routers_[end]) continue;
    const auto changes = routers_[end]->on_link_down(topo.iface_of(end, ev.link), now, log_);
    flood(end, changes, now);
  }
}

void Engine::handle(SimTime now, event::LinkUp& ev) {
  if (link_up_[ev.link]) return;
  link_up_[ev.link] = true;
  ++link_epoch_[ev.link];
  const auto& topo = cfg_.topology;
  const auto& link = topo.link(ev.link);
  log_.add(LogEvent{now, LogKind::link_up, link.a, topo.iface_of(link.a, ev.link), 0, 0, ev.link});
  for (NodeId end : {link.a, link.b}) {
    if (!routers_[end]) continue;
    const auto changes = routers_[end]->on_link_up(topo.iface_of(end, ev.link), now, log_);
    flood(end, changes, now);
  }
}

void Engine::drop(const Packet& pkt, DropReason reason, NodeId at, SimTime now) {
  LogEvent ev{now, LogKind::drop, at, -1, pkt.flow_id, pkt.uid, pkt.ttl};
  ev.reason = reason;
  log_.add(ev);
  metrics_->on_dropped(pkt, reason, now);
}

void Engine::deliver(const Packet& pkt, SimTime now) { metrics_->on_delivered(pkt, now); }

}  // namespace famtar
