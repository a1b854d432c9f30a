// Workload generators for the evaluation scenarios: Pareto-sized CBR UDP
// flow batches with exponential inter-start times, the staged background
// load with a VoIP flow, and the single CBR flow used for failure tests.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "famtar/core_model.hpp"

namespace famtar {

struct FlowSpec {
  std::string src;  ///< source host name
  std::string dst;  ///< destination host name
  std::uint64_t rate_bps = 0;       ///< wire rate; spacing = packet_size * 8 / rate
  std::uint32_t packet_size = 0;    ///< wire bytes per packet
  std::uint32_t header_bytes = 0;   ///< non-payload part of packet_size
  SimTime start{0};
  std::optional<SimTime> stop;            ///< last emission strictly before this
  std::optional<std::uint64_t> size_bytes; ///< payload bytes; open-ended when empty
  std::string label = "udp";
  std::uint8_t ttl_initial = 64;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 5000;
  std::uint8_t protocol = 17;
  bool track = false; ///< keep a per-second series for this flow

  std::uint32_t payload() const { return packet_size - header_bytes; }
  /// Emission time of packet n (0-based), exact to the microsecond floor.
  SimTime emission_time(std::uint64_t n) const;
  /// Number of packets carrying size_bytes, if bounded.
  std::optional<std::uint64_t> packet_count() const;

  /// Throws std::invalid_argument on non-positive rate/size or a header that
  /// leaves no payload.
  void validate() const;

  friend bool operator==(const FlowSpec&, const FlowSpec&) = default;
};

struct WorkloadSpec {
  std::vector<FlowSpec> flows;
  SimTime window_start{0};
  SimTime window_end{0};
};

/// Pareto sizes with mean = scale * shape / (shape - 1), truncated at `cap`.
class ParetoSampler {
 public:
  ParetoSampler(double mean, double shape, double cap);
  double scale() const { return scale_; }
  double shape() const { return shape_; }
  double operator()(std::mt19937_64& rng) const;

 private:
  double scale_;
  double shape_;
  double cap_;
};

struct Scenario1Params {
  std::uint32_t flows = 500;
  std::uint32_t packet_size = 1000;
  std::uint64_t rate_bps = 800'000;  // 100 kB/s
  double pareto_mean_bytes = 1e6;
  double pareto_shape = 1.25;
  double truncate_bytes = 1e8;
  double mean_interstart_s = 0.5;
  double window_start_s = 20;
  double window_end_s = 230;
  std::string src = "H1";
  std::string dst = "H2";

  friend bool operator==(const Scenario1Params&, const Scenario1Params&) = default;
};

/// Draw order per flow i: inter-start gap (also before flow 0), then size.
WorkloadSpec gen_scenario1_workload(std::uint64_t seed, const Scenario1Params& p = {});

struct Scenario3Params {
  std::uint64_t voip_payload_bps = 50'000;
  std::uint32_t voip_payload_bytes = 125;
  std::uint32_t voip_header_bytes = 40;
  std::uint64_t background_rate_bps = 100'000;
  std::uint32_t background_packet_size = 512;
  std::uint32_t first_group = 50;
  double first_group_start_s = 6;
  std::uint32_t second_group = 150;
  double second_group_start_s = 25;
  double second_group_stop_s = 70;
  double spacing_s = 0.2;
  double duration_s = 120;
  std::string src = "H1";
  std::string dst = "H2";

  friend bool operator==(const Scenario3Params&, const Scenario3Params&) = default;
};

/// Flow 0 is the tracked VoIP flow (label "voip").
WorkloadSpec gen_scenario3_workload(const Scenario3Params& p = {});

struct Scenario4Params {
  std::uint64_t rate_bps = 2'840'000;
  std::uint32_t packet_size = 64;
  double start_s = 0;
  double duration_s = 20;
  std::string src = "H1";
  std::string dst = "H2";

  friend bool operator==(const Scenario4Params&, const Scenario4Params&) = default;
};

/// One tracked CBR flow (label "cbr").
WorkloadSpec gen_scenario4_workload(const Scenario4Params& p = {});

}  // namespace famtar
