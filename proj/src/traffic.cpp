#include "famtar/traffic.hpp"

#include <cmath>
#include <stdexcept>

namespace famtar {

SimTime FlowSpec::emission_time(std::uint64_t n) const {
  // floor(n * bits * 1e6 / rate), split so no intermediate overflows.
  const std::uint64_t bits = n * packet_size * 8u;
  const std::uint64_t whole = bits / rate_bps;
  const std::uint64_t frac = (bits % rate_bps) * 1'000'000u / rate_bps;
  return start + SimTime{static_cast<std::int64_t>(whole * 1'000'000u + frac)};
}

std::optional<std::uint64_t> FlowSpec::packet_count() const {
  if (!size_bytes) return std::nullopt;
  const std::uint64_t per = payload();
  return (*size_bytes + per - 1) / per;
}

void FlowSpec::validate() const {
  if (rate_bps == 0) throw std::invalid_argument("flow rate must be positive");
  if (packet_size == 0) throw std::invalid_argument("packet size must be positive");
  if (header_bytes >= packet_size) throw std::invalid_argument("header leaves no payload");
  if (size_bytes && *size_bytes == 0) throw std::invalid_argument("flow size must be positive");
  if (start.count() < 0) throw std::invalid_argument("flow start must be non-negative");
  if (stop && *stop < start) throw std::invalid_argument("flow stops before it starts");
  if (src.empty() || dst.empty()) throw std::invalid_argument("flow endpoints must be named");
}

ParetoSampler::ParetoSampler(double mean, double shape, double cap)
    : scale_(mean * (shape - 1.0) / shape), shape_(shape), cap_(cap) {
  if (!(shape > 1.0)) throw std::invalid_argument("Pareto shape must exceed 1 for a finite mean");
  if (!(mean > 0.0)) throw std::invalid_argument("Pareto mean must be positive");
  if (!(cap >= scale_)) throw std::invalid_argument("Pareto truncation below the scale");
}

double ParetoSampler::operator()(std::mt19937_64& rng) const {
  // Inverse CDF with 1 - U in (0, 1].
  const double u = 1.0 - std::generate_canonical<double, 53>(rng);
  return std::min(cap_, scale_ / std::pow(u, 1.0 / shape_));
}

WorkloadSpec gen_scenario1_workload(std::uint64_t seed, const Scenario1Params& p) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(1.0 / p.mean_interstart_s);
  const ParetoSampler size(p.pareto_mean_bytes, p.pareto_shape, p.truncate_bytes);

  WorkloadSpec w;
  w.window_start = seconds(p.window_start_s);
  w.window_end = seconds(p.window_end_s);
  double t = 0;
  for (std::uint32_t i = 0; i < p.flows; ++i) {
    t += gap(rng);
    const double bytes = size(rng);
    FlowSpec f;
    f.src = p.src;
    f.dst = p.dst;
    f.rate_bps = p.rate_bps;
    f.packet_size = p.packet_size;
    f.start = seconds(t);
    f.size_bytes = static_cast<std::uint64_t>(std::llround(bytes));
    f.label = "udp";
    f.src_port = static_cast<std::uint16_t>(10000 + i);
    w.flows.push_back(std::move(f));
  }
  return w;
}

WorkloadSpec gen_scenario3_workload(const Scenario3Params& p) {
  WorkloadSpec w;
  w.window_start = SimTime{0};
  w.window_end = seconds(p.duration_s);

  FlowSpec voip;
  voip.src = p.src;
  voip.dst = p.dst;
  voip.packet_size = p.voip_payload_bytes + p.voip_header_bytes;
  voip.header_bytes = p.voip_header_bytes;
  // Same packet rate as the payload stream, with headers on the wire.
  voip.rate_bps = p.voip_payload_bps * voip.packet_size / p.voip_payload_bytes;
  voip.start = SimTime{0};
  voip.label = "voip";
  voip.src_port = 9000;
  voip.dst_port = 9000;
  voip.track = true;
  w.flows.push_back(voip);

  auto background = [&](std::uint32_t index, double start_s, std::optional<double> stop_s) {
    FlowSpec f;
    f.src = p.src;
    f.dst = p.dst;
    f.rate_bps = p.background_rate_bps;
    f.packet_size = p.background_packet_size;
    f.start = seconds(start_s);
    if (stop_s) f.stop = seconds(*stop_s);
    f.label = "bg";
    f.src_port = static_cast<std::uint16_t>(10000 + index);
    w.flows.push_back(std::move(f));
  };
  for (std::uint32_t i = 0; i < p.first_group; ++i) background(i, p.first_group_start_s + i * p.spacing_s, std::nullopt);
  for (std::uint32_t j = 0; j < p.second_group; ++j)
    background(p.first_group + j, p.second_group_start_s + j * p.spacing_s, p.second_group_stop_s + j * p.spacing_s);
  return w;
}

WorkloadSpec gen_scenario4_workload(const Scenario4Params& p) {
  WorkloadSpec w;
  w.window_start = SimTime{0};
  w.window_end = seconds(p.duration_s);
  FlowSpec f;
  f.src = p.src;
  f.dst = p.dst;
  f.rate_bps = p.rate_bps;
  f.packet_size = p.packet_size;
  f.start = seconds(p.start_s);
  f.stop = seconds(p.start_s + p.duration_s);
  f.label = "cbr";
  f.src_port = 7000;
  f.dst_port = 7000;
  f.track = true;
  w.flows.push_back(f);
  return w;
}

}  // namespace famtar
