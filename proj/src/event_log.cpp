#include "famtar/event_log.hpp"

#include <cinttypes>
#include <cstdio>

namespace famtar {

std::string_view to_string(DropReason r) {
  switch (r) {
    case DropReason::ttl_expired: return "ttl_expired";
    case DropReason::unreachable: return "unreachable";
    case DropReason::queue_full: return "queue_full";
    case DropReason::link_down: return "link_down";
  }
  return "?";
}

std::string_view to_string(LogKind k) {
  switch (k) {
    case LogKind::drop: return "drop";
    case LogKind::fft_insert: return "fft_insert";
    case LogKind::fft_blocked: return "fft_blocked";
    case LogKind::fft_purge: return "fft_purge";
    case LogKind::fft_rewrite: return "fft_rewrite";
    case LogKind::fft_ttl_raise: return "fft_ttl_raise";
    case LogKind::fft_unpin: return "fft_unpin";
    case LogKind::cost_escalate: return "cost_escalate";
    case LogKind::cost_restore: return "cost_restore";
    case LogKind::link_down: return "link_down";
    case LogKind::link_up: return "link_up";
    case LogKind::route_install: return "route_install";
  }
  return "?";
}

std::string EventLog::line(const LogEvent& ev) {
  char buf[256];
  int n = std::snprintf(buf, sizeof buf,
                        "{\"t_us\":%" PRId64 ",\"kind\":\"%s\",\"node\":%u,\"iface\":%d,\"flow\":%u,\"pkt\":%" PRIu64
                        ",\"value\":%" PRId64,
                        static_cast<std::int64_t>(ev.t.count()), to_string(ev.kind).data(), ev.node, ev.iface, ev.flow,
                        ev.packet, ev.value);
  std::string out(buf, static_cast<std::size_t>(n));
  if (ev.kind == LogKind::drop) {
    out += ",\"reason\":\"";
    out += to_string(ev.reason);
    out += '"';
  }
  out += '}';
  return out;
}

void EventLog::add(const LogEvent& ev) {
  for (unsigned char c : line(ev)) {
    hash_ ^= c;
    hash_ *= 1099511628211ull;
  }
  hash_ ^= '\n';
  hash_ *= 1099511628211ull;
  ++count_;
  ++per_kind_[static_cast<std::size_t>(ev.kind)];
  if (keep_) events_.push_back(ev);
}

std::string EventLog::to_jsonl(const Topology& topo) const {
  std::string out;
  for (const auto& ev : events_) {
    auto l = line(ev);
    if (ev.node != kNoNode) {
      l.pop_back();
      l += ",\"node_name\":\"" + topo.node(ev.node).name + "\"}";
    }
    out += l;
    out += '\n';
  }
  return out;
}

}  // namespace famtar
