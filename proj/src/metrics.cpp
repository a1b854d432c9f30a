#include "famtar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace famtar {

std::uint64_t Counters::dropped() const { return std::accumulate(drops.begin(), drops.end(), std::uint64_t{0}); }

const FlowReport* MetricsReport::tracked(const std::string& label) const {
  for (const auto& f : flows)
    if (f.tracked && f.label == label) return &f;
  return nullptr;
}

SliceSummary MetricsReport::collect(const ReportQuery& q) const {
  if (q.start.count() < 0 || q.end > duration || q.end <= q.start)
    throw std::out_of_range("query window outside the run");
  const auto first = static_cast<std::size_t>((q.start.count() + 999'999) / 1'000'000);
  const auto last = static_cast<std::size_t>(q.end.count() / 1'000'000);
  if (last <= first) throw std::out_of_range("query window holds no whole second");

  const std::vector<SecondSample>* series = &aggregate_series;
  if (q.flow_label) {
    const FlowReport* f = tracked(*q.flow_label);
    if (f == nullptr) throw std::invalid_argument("no tracked flow labelled " + *q.flow_label);
    series = &f->series;
  }

  SliceSummary s;
  s.min_bitrate_bps = std::numeric_limits<double>::infinity();
  double delay_sum = 0;
  for (std::size_t i = first; i < last && i < series->size(); ++i) {
    const auto& b = (*series)[i];
    s.sent += b.sent;
    s.received += b.received;
    s.bytes_received += b.bytes_received;
    s.drops += b.drops;
    const double rate = static_cast<double>(b.bytes_received) * 8.0;
    s.min_bitrate_bps = std::min(s.min_bitrate_bps, rate);
    s.max_bitrate_bps = std::max(s.max_bitrate_bps, rate);
    s.max_loss_per_second = std::max(s.max_loss_per_second, b.drops);
    delay_sum += b.delay_sum_us;
    s.delay_max_us = std::max(s.delay_max_us, b.delay_max_us);
  }
  if (!std::isfinite(s.min_bitrate_bps)) s.min_bitrate_bps = 0;
  s.delay_avg_us = s.received ? delay_sum / static_cast<double>(s.received) : 0.0;
  return s;
}

std::map<std::string, double> MetricsReport::scalars() const {
  std::map<std::string, double> out;
  out["received_bytes"] = static_cast<double>(window.bytes_delivered);
  out["sent_packets"] = static_cast<double>(window.generated);
  out["received_packets"] = static_cast<double>(window.delivered);
  out["dropped_packets"] = static_cast<double>(window.dropped());
  out["drop_ratio"] = window.generated ? static_cast<double>(window.dropped()) / static_cast<double>(window.generated) : 0.0;
  out["delay_avg_ms"] = window.delay_avg_us() / 1e3;
  out["delay_min_ms"] = window.delivered ? static_cast<double>(window.delay_min_us) / 1e3 : 0.0;
  out["delay_max_ms"] = static_cast<double>(window.delay_max_us) / 1e3;
  out["total_dropped"] = static_cast<double>(total.dropped());
  for (const auto& f : flows) {
    if (!f.tracked) continue;
    const double end_s = to_seconds(f.stop ? std::min(*f.stop, duration) : duration);
    const double begin_s = std::ceil(to_seconds(f.start)) + 1.0;
    const double last_s = std::floor(end_s) - 1.0;
    if (last_s > begin_s) {
      const auto s = collect(ReportQuery{seconds(begin_s), seconds(last_s), f.label});
      out[f.label + ".min_bitrate_kbps"] = s.min_bitrate_bps / 1e3;
    }
    std::uint64_t max_loss = 0;
    for (const auto& b : f.series) max_loss = std::max(max_loss, b.drops);
    out[f.label + ".max_loss_pps"] = static_cast<double>(max_loss);
    out[f.label + ".max_delay_ms"] = static_cast<double>(f.total.delay_max_us) / 1e3;
    out[f.label + ".drops"] = static_cast<double>(f.total.dropped());
    out[f.label + ".received"] = static_cast<double>(f.total.delivered);
  }
  return out;
}

std::string MetricsReport::series_csv() const {
  std::ostringstream out;
  out << "second,series,sent,received,bytes_received,drops,delay_avg_us,delay_max_us\n";
  auto emit = [&out](const std::vector<SecondSample>& s, const std::string& name) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& b = s[i];
      out << i << ',' << name << ',' << b.sent << ',' << b.received << ',' << b.bytes_received << ',' << b.drops << ','
          << b.delay_avg_us() << ',' << b.delay_max_us << '\n';
    }
  };
  emit(aggregate_series, "aggregate");
  for (const auto& f : flows)
    if (f.tracked) emit(f.series, "flow:" + f.label);
  return out.str();
}

std::string MetricsReport::series_jsonl() const {
  std::ostringstream out;
  auto emit = [&out](const std::vector<SecondSample>& s, const std::string& name) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto& b = s[i];
      out << "{\"second\":" << i << ",\"series\":\"" << name << "\",\"sent\":" << b.sent
          << ",\"received\":" << b.received << ",\"bytes_received\":" << b.bytes_received
          << ",\"drops\":" << b.drops << ",\"delay_avg_us\":" << b.delay_avg_us()
          << ",\"delay_max_us\":" << b.delay_max_us << "}\n";
    }
  };
  emit(aggregate_series, "aggregate");
  for (const auto& f : flows)
    if (f.tracked) emit(f.series, "flow:" + f.label);
  return out.str();
}

std::string MetricsReport::links_csv(const Topology& topo) const {
  std::ostringstream out;
  out << "second,from,to,bytes,utilization\n";
  for (const auto& l : links) {
    for (std::size_t i = 0; i < l.bytes_per_second.size(); ++i) {
      const double util = static_cast<double>(l.bytes_per_second[i]) * 8.0 / static_cast<double>(l.capacity_bps);
      out << i << ',' << topo.node(l.from).name << ',' << topo.node(l.to).name << ',' << l.bytes_per_second[i] << ','
          << util << '\n';
    }
  }
  return out.str();
}

MetricsCollector::MetricsCollector(const Topology& topo, const WorkloadSpec& workload, SimTime duration,
                                   bool trace_paths)
    : trace_paths_(trace_paths) {
  report_.duration = duration;
  report_.window_start = workload.window_start;
  report_.window_end = workload.window_end;
  const auto seconds_n = static_cast<std::size_t>((duration.count() + 999'999) / 1'000'000);
  report_.aggregate_series.resize(seconds_n);
  for (std::uint32_t i = 0; i < workload.flows.size(); ++i) {
    const auto& spec = workload.flows[i];
    FlowReport f;
    f.id = i;
    f.label = spec.label;
    f.start = spec.start;
    f.stop = spec.stop;
    f.tracked = spec.track;
    if (f.tracked) f.series.resize(seconds_n);
    report_.flows.push_back(std::move(f));
  }
  for (const auto& l : topo.links()) {
    for (bool rev : {false, true}) {
      const auto dl = Topology::dirlink(l.id, rev);
      report_.links.push_back(
          LinkSeries{dl, topo.dir_source(dl), topo.dir_target(dl), l.capacity_bps, std::vector<std::uint64_t>(seconds_n)});
    }
  }
}

std::size_t MetricsCollector::second_of(SimTime t) const {
  const auto s = static_cast<std::size_t>(t.count() / 1'000'000);
  return std::min(s, report_.aggregate_series.size() - 1);
}

void MetricsCollector::on_generated(const Packet& pkt, SimTime now) {
  auto bump = [&](Counters& c) {
    ++c.generated;
    c.bytes_generated += pkt.payload;
  };
  bump(report_.total);
  auto& flow = report_.flows[pkt.flow_id];
  bump(flow.total);
  if (in_window(pkt)) bump(report_.window);
  const auto s = second_of(now);
  ++report_.aggregate_series[s].sent;
  if (flow.tracked) ++flow.series[s].sent;
}

void MetricsCollector::on_delivered(const Packet& pkt, SimTime now) {
  const std::int64_t delay = (now - pkt.created_at).count();
  auto bump = [&](Counters& c) {
    ++c.delivered;
    c.bytes_delivered += pkt.payload;
    c.delay_sum_us += static_cast<double>(delay);
    c.delay_min_us = std::min(c.delay_min_us, delay);
    c.delay_max_us = std::max(c.delay_max_us, delay);
  };
  auto bump_sample = [&](SecondSample& b) {
    ++b.received;
    b.bytes_received += pkt.payload;
    b.delay_sum_us += static_cast<double>(delay);
    b.delay_max_us = std::max(b.delay_max_us, delay);
  };
  bump(report_.total);
  auto& flow = report_.flows[pkt.flow_id];
  bump(flow.total);
  if (in_window(pkt)) bump(report_.window);
  const auto s = second_of(now);
  bump_sample(report_.aggregate_series[s]);
  if (flow.tracked) bump_sample(flow.series[s]);
  if (trace_paths_) trace(pkt, PacketOutcome::delivered, DropReason::ttl_expired);
}

void MetricsCollector::on_dropped(const Packet& pkt, DropReason reason, SimTime now) {
  const auto r = static_cast<std::size_t>(reason);
  ++report_.total.drops[r];
  auto& flow = report_.flows[pkt.flow_id];
  ++flow.total.drops[r];
  if (in_window(pkt)) ++report_.window.drops[r];
  const auto s = second_of(now);
  ++report_.aggregate_series[s].drops;
  if (flow.tracked) ++flow.series[s].drops;
  if (trace_paths_) trace(pkt, PacketOutcome::dropped, reason);
}

void MetricsCollector::on_transmitted(DirLinkId dl, std::uint32_t bytes, SimTime now) {
  report_.links[dl].bytes_per_second[second_of(now)] += bytes;
}

void MetricsCollector::trace(const Packet& pkt, PacketOutcome outcome, DropReason reason) {
  report_.traces.push_back(PathTrace{pkt.flow_id, pkt.flow_seq, pkt.uid, pkt.created_at, outcome, reason, pkt.path});
}

MetricsReport MetricsCollector::finish(std::uint64_t in_flight, const EventLog& log) {
  report_.in_flight_at_end = in_flight;
  report_.event_log_hash = log.hash();
  report_.event_count = log.count();
  for (auto k = static_cast<int>(LogKind::drop); k <= static_cast<int>(LogKind::route_install); ++k) {
    const auto kind = static_cast<LogKind>(k);
    report_.event_kind_counts[std::string(to_string(kind))] = log.count(kind);
  }
  for (const auto& ev : log.events()) {
    if (ev.kind == LogKind::cost_escalate) {
      report_.congestion.push_back(CongestionInterval{ev.node, ev.iface, ev.t, std::nullopt});
    } else if (ev.kind == LogKind::cost_restore) {
      for (auto it = report_.congestion.rbegin(); it != report_.congestion.rend(); ++it) {
        if (it->router == ev.node && it->iface == ev.iface && !it->end) {
          it->end = ev.t;
          break;
        }
      }
    }
  }
  return std::move(report_);
}

}  // namespace famtar
