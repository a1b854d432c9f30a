// Measurement apparatus: per-flow and aggregate counters, per-second series
// and per-link utilisation, plus windowed queries over a finished run.
#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "famtar/core_model.hpp"
#include "famtar/event_log.hpp"
#include "famtar/traffic.hpp"

namespace famtar {

struct Counters {
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::array<std::uint64_t, kDropReasonCount> drops{};
  std::uint64_t bytes_generated = 0; ///< payload bytes
  std::uint64_t bytes_delivered = 0; ///< payload bytes
  double delay_sum_us = 0;
  std::int64_t delay_min_us = std::numeric_limits<std::int64_t>::max();
  std::int64_t delay_max_us = 0;

  std::uint64_t dropped() const;
  std::uint64_t dropped(DropReason r) const { return drops[static_cast<std::size_t>(r)]; }
  double delay_avg_us() const { return delivered ? delay_sum_us / static_cast<double>(delivered) : 0.0; }
};

/// One whole second of simulated time, keyed by when things happened.
struct SecondSample {
  std::uint64_t sent = 0;
  std::uint64_t received = 0;
  std::uint64_t bytes_received = 0; ///< payload bytes
  std::uint64_t drops = 0;
  double delay_sum_us = 0;
  std::int64_t delay_max_us = 0;

  double delay_avg_us() const { return received ? delay_sum_us / static_cast<double>(received) : 0.0; }
};

struct FlowReport {
  std::uint32_t id = 0;
  std::string label;
  FlowKey key;
  SimTime start{0};
  std::optional<SimTime> stop;
  bool tracked = false;
  Counters total;
  std::vector<SecondSample> series; ///< only for tracked flows
};

struct LinkSeries {
  DirLinkId dirlink = 0;
  NodeId from = kNoNode;
  NodeId to = kNoNode;
  std::uint64_t capacity_bps = 0;
  std::vector<std::uint64_t> bytes_per_second;
};

struct CongestionInterval {
  NodeId router = kNoNode;
  int iface = -1;
  SimTime begin{0};
  std::optional<SimTime> end;
};

enum class PacketOutcome : std::uint8_t { delivered, dropped };

struct PathTrace {
  std::uint32_t flow = 0;
  std::uint64_t seq = 0;
  std::uint64_t uid = 0;
  SimTime created_at{0};
  PacketOutcome outcome = PacketOutcome::delivered;
  DropReason reason = DropReason::ttl_expired;
  std::vector<NodeId> path;
};

struct ReportQuery {
  SimTime start{0};
  SimTime end{0};
  std::optional<std::string> flow_label; ///< tracked flow; aggregate when empty
};

struct SliceSummary {
  std::uint64_t sent = 0;
  std::uint64_t received = 0;
  std::uint64_t bytes_received = 0;
  std::uint64_t drops = 0;
  double min_bitrate_bps = 0;
  double max_bitrate_bps = 0;
  std::uint64_t max_loss_per_second = 0;
  double delay_avg_us = 0;
  std::int64_t delay_max_us = 0;
};

struct MetricsReport {
  SimTime duration{0};
  SimTime window_start{0};
  SimTime window_end{0};
  Counters total;  ///< whole run
  Counters window; ///< packets created inside [window_start, window_end)
  std::vector<SecondSample> aggregate_series;
  std::vector<FlowReport> flows;
  std::vector<LinkSeries> links;
  std::vector<CongestionInterval> congestion;
  std::vector<PathTrace> traces;
  std::uint64_t in_flight_at_end = 0;
  std::uint64_t event_log_hash = 0;
  std::size_t event_count = 0;
  std::map<std::string, std::size_t> event_kind_counts;

  const FlowReport* tracked(const std::string& label) const;

  /// Windowed aggregation over the per-second series. Throws
  /// std::out_of_range for windows outside [0, duration] or empty windows,
  /// std::invalid_argument for an unknown tracked-flow label.
  SliceSummary collect(const ReportQuery& q) const;

  /// Named scalars used for repetition statistics and paired summaries.
  std::map<std::string, double> scalars() const;

  /// "second,series,sent,received,bytes_received,drops,delay_avg_us,delay_max_us".
  std::string series_csv() const;
  /// Same rows as series_csv, one JSON object per line.
  std::string series_jsonl() const;
  /// "second,from,to,bytes,utilization".
  std::string links_csv(const Topology& topo) const;
};

/// Accumulates counters during a run. Owned by the engine.
class MetricsCollector {
 public:
  MetricsCollector(const Topology& topo, const WorkloadSpec& workload, SimTime duration, bool trace_paths);

  void on_generated(const Packet& pkt, SimTime now);
  void on_delivered(const Packet& pkt, SimTime now);
  void on_dropped(const Packet& pkt, DropReason reason, SimTime now);
  void on_transmitted(DirLinkId dl, std::uint32_t bytes, SimTime now);
  void set_flow_key(std::uint32_t flow, const FlowKey& key) { report_.flows.at(flow).key = key; }

  /// Finalises congestion intervals from the event log and hands out the report.
  MetricsReport finish(std::uint64_t in_flight, const EventLog& log);

 private:
  bool in_window(const Packet& pkt) const {
    return pkt.created_at >= report_.window_start && pkt.created_at < report_.window_end;
  }
  std::size_t second_of(SimTime t) const;
  void trace(const Packet& pkt, PacketOutcome outcome, DropReason reason);

  bool trace_paths_;
  MetricsReport report_;
};

}  // namespace famtar
