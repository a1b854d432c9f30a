#include "famtar/pipeline.hpp"

#include <stdexcept>

namespace famtar {

void MonitorConfig::validate() const {
  if (!(clear_threshold > 0.0 && clear_threshold < congest_threshold && congest_threshold <= 1.0))
    throw std::invalid_argument("monitor thresholds must satisfy 0 < clear < congest <= 1");
  if (period.count() <= 0) throw std::invalid_argument("monitor period must be positive");
  if (high_cost == 0) throw std::invalid_argument("high cost must be positive");
  if (stagger.count() < 0) throw std::invalid_argument("monitor stagger must be non-negative");
}

void FamtarConfig::validate() const {
  monitor.validate();
  if (flow_timeout.count() <= 0) throw std::invalid_argument("flow timeout must be positive");
  if (block_duration.count() < 0) throw std::invalid_argument("block duration must be non-negative");
  if (fft_buckets == 0) throw std::invalid_argument("FFT bucket count must be positive");
}

Router::Router(const Topology& topo, NodeId id, const FamtarConfig& cfg)
    : topo_(&topo),
      id_(id),
      cfg_(cfg),
      fft_(cfg.flow_timeout, cfg.fft_buckets),
      db_(topo),
      table_(spf(topo, db_, id)) {
  for (const auto& itf : topo.node(id).ifaces) {
    const auto& l = topo.link(itf.link);
    ifaces_.push_back(RouterInterface{itf.link, itf.out, itf.peer, l.capacity_bps, l.base_cost, 0, false,
                                      l.base_cost, true});
  }
}

Decision Router::process_packet(Packet& pkt, IfaceIndex /*ingress*/, SimTime now, EventLog& log) {
  const auto dest = topo_->find_by_address(pkt.key.dst_addr);
  if (dest && *dest == id_) return DeliverLocal{};

  // DecIPTTL; expired packets are discarded without any error message.
  if (pkt.ttl <= 1) {
    pkt.ttl = 0;
    return Drop{DropReason::ttl_expired};
  }
  --pkt.ttl;

  if (!dest) return Drop{DropReason::unreachable};
  if (!cfg_.enabled) {
    const Route* r = table_.find(*dest);
    if (r == nullptr) return Drop{DropReason::unreachable};
    return Forward{r->iface, r->gateway};
  }

  // CheckFFT
  if (auto entry = fft_.lookup(pkt.key, now)) {
    if (cfg_.loop_resolution) return resolve_loop(pkt, *entry, now, log);
    fft_.touch(pkt.key, now);
    return Forward{entry->port, entry->gateway};
  }
  return route_and_pin(pkt, *dest, now, log);
}

Decision Router::route_and_pin(const Packet& pkt, NodeId dest, SimTime now, EventLog& log) {
  // LookupIPRoute
  const Route* r = table_.find(dest);
  if (r == nullptr) return Drop{DropReason::unreachable};
  // AddFFT; a refused entry does not stop the packet.
  const auto res = fft_.insert(pkt.key, FlowValue{now, r->iface, r->gateway, pkt.ttl}, now);
  log.add(LogEvent{now, res == InsertResult::inserted ? LogKind::fft_insert : LogKind::fft_blocked, id_, r->iface,
                   pkt.flow_id, pkt.uid, pkt.ttl});
  return Forward{r->iface, r->gateway};
}

Decision Router::resolve_loop(const Packet& pkt, const FlowValue& entry, SimTime now, EventLog& log,
                              LoopVerdict* verdict) {
  auto set = [verdict](LoopVerdict v) {
    if (verdict != nullptr) *verdict = v;
  };
  if (pkt.ttl == entry.ttl) {
    set(LoopVerdict::keep);
    fft_.touch(pkt.key, now);
    return Forward{entry.port, entry.gateway};
  }
  if (pkt.ttl > entry.ttl) {
    set(LoopVerdict::raise_ttl);
    fft_.set_ttl(pkt.key, pkt.ttl, now);
    log.add(LogEvent{now, LogKind::fft_ttl_raise, id_, entry.port, pkt.flow_id, pkt.uid, pkt.ttl});
    return Forward{entry.port, entry.gateway};
  }

  // The packet has been here before with a higher TTL (loop) or the path
  // behind us changed: re-pin from the current routing table.
  const auto dest = topo_->find_by_address(pkt.key.dst_addr);
  const Route* r = dest ? table_.find(*dest) : nullptr;
  if (r == nullptr) {
    set(LoopVerdict::unreachable);
    fft_.erase(pkt.key);
    log.add(LogEvent{now, LogKind::fft_unpin, id_, entry.port, pkt.flow_id, pkt.uid, pkt.ttl});
    return Drop{DropReason::unreachable};
  }
  if (fft_.is_blocked(r->iface, now)) {
    set(LoopVerdict::unpin);
    fft_.erase(pkt.key);
    log.add(LogEvent{now, LogKind::fft_unpin, id_, r->iface, pkt.flow_id, pkt.uid, pkt.ttl});
    return Forward{r->iface, r->gateway};
  }
  set(LoopVerdict::rewrite);
  fft_.update_entry(pkt.key, r->iface, r->gateway, pkt.ttl, now);
  log.add(LogEvent{now, LogKind::fft_rewrite, id_, r->iface, pkt.flow_id, pkt.uid, pkt.ttl});
  return Forward{r->iface, r->gateway};
}

void Router::originate(std::vector<CostChange>& out, DirLinkId dl, std::uint32_t cost, bool up) {
  out.push_back(CostChange{dl, db_.originate(dl, cost, up)});
}

std::vector<CostChange> Router::monitor_tick(SimTime now, EventLog& log) {
  std::vector<CostChange> out;
  const double period_s = to_seconds(cfg_.monitor.period);
  for (std::size_t i = 0; i < ifaces_.size(); ++i) {
    auto& itf = ifaces_[i];
    const double load = static_cast<double>(itf.window_bytes) * 8.0 / period_s / static_cast<double>(itf.capacity_bps);
    itf.window_bytes = 0;
    if (!cfg_.enabled || !itf.up) continue;
    if (!itf.congested && load >= cfg_.monitor.congest_threshold) {
      itf.congested = true;
      itf.original_cost = db_.at(itf.out).cost;
      originate(out, itf.out, cfg_.monitor.high_cost, true);
      if (cfg_.symmetric_escalation) originate(out, Topology::reverse_of(itf.out), cfg_.monitor.high_cost, true);
      log.add(LogEvent{now, LogKind::cost_escalate, id_, static_cast<int>(i), 0, 0, cfg_.monitor.high_cost});
    } else if (itf.congested && load <= cfg_.monitor.clear_threshold) {
      itf.congested = false;
      originate(out, itf.out, itf.original_cost, true);
      if (cfg_.symmetric_escalation) originate(out, Topology::reverse_of(itf.out), itf.original_cost, true);
      log.add(LogEvent{now, LogKind::cost_restore, id_, static_cast<int>(i), 0, 0, itf.original_cost});
    }
  }
  return out;
}

std::vector<CostChange> Router::on_link_down(IfaceIndex iface, SimTime now, EventLog& log) {
  auto& itf = ifaces_.at(iface);
  std::vector<CostChange> out;
  itf.up = false;
  itf.window_bytes = 0;
  std::uint32_t cost = db_.at(itf.out).cost;
  if (itf.congested) {
    itf.congested = false;
    cost = itf.original_cost;
  }
  if (cfg_.enabled) {
    const auto purged = fft_.purge_interface(iface);
    fft_.block_interface(iface, now, cfg_.block_duration);
    log.add(LogEvent{now, LogKind::fft_purge, id_, iface, 0, 0, static_cast<std::int64_t>(purged)});
  }
  originate(out, itf.out, cost, false);
  return out;
}

std::vector<CostChange> Router::on_link_up(IfaceIndex iface, SimTime /*now*/, EventLog& /*log*/) {
  auto& itf = ifaces_.at(iface);
  std::vector<CostChange> out;
  itf.up = true;
  itf.window_bytes = 0;
  itf.congested = false;
  originate(out, itf.out, itf.base_cost, true);
  return out;
}

}  // namespace famtar
