#include "famtar/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "famtar/engine.hpp"

namespace famtar {

Stat summarize(const std::vector<double>& samples) {
  Stat s;
  s.n = samples.size();
  if (s.n == 0) return s;
  double sum = 0;
  for (double x : samples) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double sq = 0;
    for (double x : samples) sq += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(s.n - 1));
  }
  return s;
}

ExperimentResult run_experiment(const ScenarioFile& scenario, std::uint32_t repetitions, std::uint64_t seed_base,
                                const RunOptions& opts) {
  if (repetitions == 0) throw std::invalid_argument("repetitions must be positive");
  validate_scenario(scenario);

  ExperimentResult out;
  out.scenario = scenario;
  out.runs.resize(repetitions);
  if (opts.keep_event_logs) out.event_logs.resize(repetitions);
  out.topology = build_topology(scenario.topology);
  for (std::uint32_t i = 0; i < repetitions; ++i) out.seeds.push_back(seed_base + i);

  unsigned workers = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, repetitions);

  std::atomic<std::uint32_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (std::uint32_t i = next++; i < repetitions; i = next++) {
      try {
        auto cfg = build_sim_config(scenario, out.seeds[i]);
        cfg.trace_paths = opts.trace_paths;
        cfg.record_routes = opts.record_routes;
        Engine engine(std::move(cfg));
        out.runs[i] = engine.run();
        if (opts.keep_event_logs) out.event_logs[i] = engine.log().to_jsonl(engine.topology());
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();
  if (failure) std::rethrow_exception(failure);

  std::map<std::string, std::vector<double>> samples;
  for (const auto& r : out.runs)
    for (const auto& [k, v] : r.scalars()) samples[k].push_back(v);
  for (const auto& [k, v] : samples) out.stats[k] = summarize(v);
  return out;
}

namespace {

std::string comparable(ScenarioFile s) {
  s.name.clear();
  s.famtar.enabled = true;
  return serialize_scenario(s);
}

}  // namespace

std::vector<PairedRow> pair_results(const ExperimentResult& baseline, const ExperimentResult& famtar,
                                    const std::vector<SummaryMetric>& metrics) {
  if (baseline.scenario.famtar.enabled) throw std::invalid_argument("baseline run has FAMTAR enabled");
  if (!famtar.scenario.famtar.enabled) throw std::invalid_argument("FAMTAR run has FAMTAR disabled");
  if (comparable(baseline.scenario) != comparable(famtar.scenario))
    throw std::invalid_argument("paired scenarios differ beyond the forwarding mode");
  if (baseline.seeds != famtar.seeds) throw std::invalid_argument("paired runs used different seeds");

  std::vector<PairedRow> rows;
  for (const auto& m : metrics) {
    auto b = baseline.stats.find(m.key);
    auto f = famtar.stats.find(m.key);
    if (b == baseline.stats.end() || f == famtar.stats.end())
      throw std::invalid_argument("metric '" + m.key + "' missing from a run");
    PairedRow row{m, b->second, f->second};
    const double sign = m.better == Better::higher ? 1.0 : -1.0;
    // Adding +0.0 turns a negated zero into +0 for display.
    row.difference = sign * (row.famtar.mean - row.baseline.mean) + 0.0;
    row.relative_gain = row.baseline.mean != 0 ? row.difference / row.baseline.mean + 0.0 : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SummaryMetric> default_summary_metrics(const ScenarioFile& s) {
  if (std::holds_alternative<Scenario3Params>(s.workload)) {
    return {{"voip.min_bitrate_kbps", "VoIP min bitrate [kbit/s]", Better::higher},
            {"voip.max_loss_pps", "VoIP max loss [pkt/s]", Better::lower},
            {"voip.max_delay_ms", "VoIP max delay [ms]", Better::lower}};
  }
  if (std::holds_alternative<Scenario4Params>(s.workload)) {
    return {{"cbr.drops", "CBR packets lost", Better::lower},
            {"cbr.received", "CBR packets received", Better::higher},
            {"cbr.max_delay_ms", "CBR max delay [ms]", Better::lower}};
  }
  return {{"received_bytes", "Received [B]", Better::higher},
          {"dropped_packets", "Dropped packets", Better::lower},
          {"drop_ratio", "Drop ratio", Better::lower},
          {"delay_avg_ms", "Avg delay [ms]", Better::lower}};
}

std::string emit_summary(const std::vector<PairedRow>& rows) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %24s %24s %14s %9s\n", "metric", "IP", "FAMTAR", "difference", "gain");
  out << line;
  for (const auto& r : rows) {
    char ip[64];
    char fam[64];
    std::snprintf(ip, sizeof ip, "%.4g +- %.3g", r.baseline.mean, r.baseline.stddev);
    std::snprintf(fam, sizeof fam, "%.4g +- %.3g", r.famtar.mean, r.famtar.stddev);
    std::snprintf(line, sizeof line, "%-28s %24s %24s %14.4g %8.1f%%\n", r.metric.title.c_str(), ip, fam,
                  r.difference, r.relative_gain * 100.0);
    out << line;
  }
  return out.str();
}

}  // namespace famtar
