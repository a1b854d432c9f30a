// famtar_sim: run, batch-run, validate and compare simulation scenarios.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "famtar/experiment.hpp"
#include "famtar/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace famtar;

namespace {

constexpr int kSummaryFormatVersion = 1;

struct RunFlags {
  std::optional<std::uint32_t> repetitions;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  std::string famtar;
  unsigned workers = 0;
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
}

json summary_json(const ExperimentResult& r) {
  json runs = json::array();
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    const auto& rep = r.runs[i];
    runs.push_back(json{{"seed", r.seeds[i]},
                        {"scalars", rep.scalars()},
                        {"event_log_hash", rep.event_log_hash},
                        {"in_flight_at_end", rep.in_flight_at_end}});
  }
  json stats = json::object();
  for (const auto& [k, s] : r.stats) stats[k] = json{{"mean", s.mean}, {"stddev", s.stddev}, {"n", s.n}};
  return json{{"format_version", kSummaryFormatVersion},
              {"scenario", r.scenario.name},
              {"famtar", r.scenario.famtar.enabled},
              {"repetitions", r.runs.size()},
              {"runs", std::move(runs)},
              {"stats", std::move(stats)}};
}

std::string stats_table(const ExperimentResult& r) {
  std::string out = r.scenario.name + (r.scenario.famtar.enabled ? " [FAMTAR]" : " [IP]") + "\n";
  char line[160];
  for (const auto& [k, s] : r.stats) {
    std::snprintf(line, sizeof line, "  %-28s %14.6g +- %.4g\n", k.c_str(), s.mean, s.stddev);
    out += line;
  }
  return out;
}

ScenarioFile apply_overrides(ScenarioFile s, const RunFlags& f) {
  if (f.famtar == "on") s.famtar.enabled = true;
  else if (f.famtar == "off") s.famtar.enabled = false;
  return s;
}

ExperimentResult run_one(const ScenarioFile& s, const RunFlags& f, bool keep_logs) {
  RunOptions opts;
  opts.workers = f.workers;
  opts.keep_event_logs = keep_logs;
  return run_experiment(s, f.repetitions.value_or(s.repetitions), f.seed.value_or(s.seed), opts);
}

void emit_outputs(const ExperimentResult& r, const RunFlags& f) {
  const fs::path dir(f.out);
  fs::create_directories(dir);
  const std::string stem = r.scenario.name;
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    const std::string base = stem + ".rep" + std::to_string(i);
    const auto& rep = r.runs[i];
    if (f.format == "jsonl") write_file(dir / (base + ".metrics.jsonl"), rep.series_jsonl());
    else write_file(dir / (base + ".metrics.csv"), rep.series_csv());
    write_file(dir / (base + ".links.csv"), rep.links_csv(r.topology));
    if (i < r.event_logs.size()) write_file(dir / (base + ".events.jsonl"), r.event_logs[i]);
  }
  write_file(dir / (stem + ".summary.json"), summary_json(r).dump(2) + "\n");
  write_file(dir / (stem + ".summary.txt"), stats_table(r));
}

int cmd_run(const std::string& path, const RunFlags& f) {
  const auto s = apply_overrides(load_scenario(path), f);
  const auto r = run_one(s, f, !f.out.empty());
  std::cout << stats_table(r);
  if (!f.out.empty()) emit_outputs(r, f);
  return 0;
}

int cmd_suite(const std::string& dir, const RunFlags& f) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no scenario files in " + dir);

  std::map<std::string, ExperimentResult> results;
  for (const auto& p : files) {
    const auto s = apply_overrides(load_scenario(p.string()), f);
    auto r = run_one(s, f, !f.out.empty());
    std::cout << stats_table(r) << std::flush;
    if (!f.out.empty()) emit_outputs(r, f);
    results.emplace(p.stem().string(), std::move(r));
  }

  // Pair <name>.ip with <name>.famtar.
  int status = 0;
  for (const auto& [stem, base] : results) {
    const auto dot = stem.rfind(".ip");
    if (dot == std::string::npos || dot + 3 != stem.size()) continue;
    const auto other = results.find(stem.substr(0, dot) + ".famtar");
    if (other == results.end()) continue;
    try {
      const auto rows = pair_results(base, other->second, default_summary_metrics(base.scenario));
      std::cout << "\n" << stem.substr(0, dot) << "\n" << emit_summary(rows);
    } catch (const std::invalid_argument& e) {
      std::cerr << stem << ": " << e.what() << "\n";
      status = 1;
    }
  }
  return status;
}

int cmd_validate(const std::vector<std::string>& paths) {
  int status = 0;
  for (const auto& p : paths) {
    try {
      validate_scenario(load_scenario(p));
      std::cout << p << ": ok\n";
    } catch (const std::exception& e) {
      std::cout << p << ": " << e.what() << "\n";
      status = 1;
    }
  }
  return status;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

int cmd_diff(const std::string& a_path, const std::string& b_path, double rel_tol, double abs_tol) {
  const json a = load_json(a_path);
  const json b = load_json(b_path);
  for (const auto* j : {&a, &b})
    if (j->value("format_version", 0) != kSummaryFormatVersion) throw std::runtime_error("unsupported summary format");
  int violations = 0;
  for (const auto& [key, sa] : a.at("stats").items()) {
    if (!b.at("stats").contains(key)) {
      std::cout << key << ": missing in " << b_path << "\n";
      ++violations;
      continue;
    }
    const double x = sa.at("mean").get<double>();
    const double y = b.at("stats").at(key).at("mean").get<double>();
    const double allowed = abs_tol + rel_tol * std::abs(x);
    const bool ok = std::abs(x - y) <= allowed;
    if (!ok) ++violations;
    std::cout << (ok ? "ok   " : "FAIL ") << key << ": " << x << " vs " << y << "\n";
  }
  for (const auto& [key, sb] : b.at("stats").items()) {
    if (!a.at("stats").contains(key)) {
      std::cout << key << ": missing in " << a_path << "\n";
      ++violations;
    }
  }
  std::cout << violations << " violation(s)\n";
  return violations ? 1 : 0;
}

void add_run_flags(CLI::App* app, RunFlags& f) {
  app->add_option("--repetitions", f.repetitions, "Override the repetition count")->check(CLI::PositiveNumber);
  app->add_option("--seed", f.seed, "Override the seed base (repetition i uses seed + i)");
  app->add_option("--out", f.out, "Directory for metrics, link, event and summary files");
  app->add_option("--format", f.format, "Per-second metrics format")->check(CLI::IsMember({"csv", "jsonl"}));
  app->add_option("--famtar", f.famtar, "Force FAMTAR on or off")->check(CLI::IsMember({"on", "off"}));
  app->add_option("--workers", f.workers, "Worker threads (0 = hardware concurrency)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FAMTAR packet-level network simulator"};
  app.require_subcommand(1);

  RunFlags run_flags;
  std::string scenario;
  auto* run = app.add_subcommand("run", "Run one scenario file");
  run->add_option("--scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  add_run_flags(run, run_flags);

  RunFlags suite_flags;
  std::string dir;
  auto* suite = app.add_subcommand("suite", "Run every scenario in a directory and pair IP/FAMTAR results");
  suite->add_option("dir", dir, "Scenario directory")->required()->check(CLI::ExistingDirectory);
  add_run_flags(suite, suite_flags);

  std::vector<std::string> to_validate;
  auto* validate = app.add_subcommand("validate", "Schema-check scenario files");
  validate->add_option("files", to_validate, "Scenario files")->required();

  std::string diff_a;
  std::string diff_b;
  double rel_tol = 0.05;
  double abs_tol = 0;
  auto* diff = app.add_subcommand("diff", "Compare two summary.json reports");
  diff->add_option("a", diff_a)->required()->check(CLI::ExistingFile);
  diff->add_option("b", diff_b)->required()->check(CLI::ExistingFile);
  diff->add_option("--rel-tol", rel_tol, "Allowed relative difference of means");
  diff->add_option("--abs-tol", abs_tol, "Allowed absolute difference of means");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(scenario, run_flags);
    if (*suite) return cmd_suite(dir, suite_flags);
    if (*validate) return cmd_validate(to_validate);
    if (*diff) return cmd_diff(diff_a, diff_b, rel_tol, abs_tol);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
