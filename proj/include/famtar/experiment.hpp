// Repetition driver and paired baseline/FAMTAR summaries.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "famtar/metrics.hpp"
#include "famtar/scenario.hpp"

namespace famtar {

struct Stat {
  double mean = 0;
  double stddev = 0; ///< sample standard deviation; 0 for a single run
  std::size_t n = 0;
};

Stat summarize(const std::vector<double>& samples);

struct RunOptions {
  unsigned workers = 0; ///< 0 picks hardware concurrency
  bool trace_paths = false;
  bool record_routes = false;
  bool keep_event_logs = false; ///< fills ExperimentResult::event_logs
};

struct ExperimentResult {
  ScenarioFile scenario;
  std::vector<std::uint64_t> seeds;
  std::vector<MetricsReport> runs; ///< in seed order
  std::vector<std::string> event_logs; ///< JSONL per run, when requested
  Topology topology;
  std::map<std::string, Stat> stats;
};

/// Runs `repetitions` independent repetitions with seeds seed_base + i.
/// Results do not depend on the worker count.
ExperimentResult run_experiment(const ScenarioFile& scenario, std::uint32_t repetitions, std::uint64_t seed_base,
                                const RunOptions& opts = {});

enum class Better { higher, lower };

struct SummaryMetric {
  std::string key; ///< scalar name from MetricsReport::scalars()
  std::string title;
  Better better = Better::higher;
};

struct PairedRow {
  SummaryMetric metric;
  Stat baseline;
  Stat famtar;
  double difference = 0;    ///< positive when FAMTAR is better
  double relative_gain = 0; ///< difference / baseline mean
};

/// Throws std::invalid_argument unless the two runs differ only in
/// forwarding mode (and name), with FAMTAR off in `baseline` and on in
/// `famtar`, and with identical seeds.
std::vector<PairedRow> pair_results(const ExperimentResult& baseline, const ExperimentResult& famtar,
                                    const std::vector<SummaryMetric>& metrics);

/// Metric set matching the scenario's workload kind.
std::vector<SummaryMetric> default_summary_metrics(const ScenarioFile& s);

/// Fixed-width table: metric, IP, FAMTAR, difference, gain.
std::string emit_summary(const std::vector<PairedRow>& rows);

}  // namespace famtar
