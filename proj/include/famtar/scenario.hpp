// Declarative scenario documents (JSON, schema version 1), the testbed
// topology builders and the translation into an engine configuration.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "famtar/engine.hpp"
#include "famtar/traffic.hpp"

namespace famtar {

inline constexpr int kScenarioSchemaVersion = 1;

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NodeDecl {
  std::string name;
  NodeKind kind = NodeKind::router;
  std::optional<std::string> address;
  friend bool operator==(const NodeDecl&, const NodeDecl&) = default;
};

struct LinkDecl {
  std::string a;
  std::string b;
  std::uint64_t capacity_bps = 10'000'000;
  double delay_s = 0.001;
  std::uint32_t cost = 10;
  std::uint32_t queue_packets = 100;
  friend bool operator==(const LinkDecl&, const LinkDecl&) = default;
};

struct ExplicitTopology {
  std::vector<NodeDecl> nodes;
  std::vector<LinkDecl> links;
  friend bool operator==(const ExplicitTopology&, const ExplicitTopology&) = default;
};

/// H1 - R1 = k parallel paths = R4 - H2.
struct ParallelPaths {
  int paths = 1;
  int transit_per_path = 1;
  std::uint64_t core_capacity_bps = 10'000'000;
  std::uint64_t edge_capacity_bps = 100'000'000;
  double delay_s = 0.001;
  std::uint32_t cost = 10;
  std::uint32_t queue_packets = 100;
  friend bool operator==(const ParallelPaths&, const ParallelPaths&) = default;
};

using TopologyDecl = std::variant<ParallelPaths, ExplicitTopology>;

struct RoutingDecl {
  double flood_hop_delay_s = 0.010;
  double spf_delay_s = 0.020;
  std::map<std::string, double> spf_delay_overrides_s;
  std::uint32_t high_cost = 10000;
  bool symmetric_escalation = false;
  friend bool operator==(const RoutingDecl&, const RoutingDecl&) = default;
};

struct FamtarDecl {
  bool enabled = true;
  double congest_threshold = 0.90;
  double clear_threshold = 0.70;
  double flow_timeout_s = 10;
  double block_duration_s = 5;
  std::uint32_t fft_buckets = 4096;
  bool loop_resolution = true;
  double monitor_period_s = 1;
  double monitor_stagger_s = 0;
  friend bool operator==(const FamtarDecl&, const FamtarDecl&) = default;
};

struct ExplicitFlows {
  std::vector<FlowSpec> flows;
  double window_start_s = 0;
  std::optional<double> window_end_s; ///< defaults to the scenario duration
  friend bool operator==(const ExplicitFlows&, const ExplicitFlows&) = default;
};

using WorkloadDecl = std::variant<Scenario1Params, Scenario3Params, Scenario4Params, ExplicitFlows>;

struct FailureDecl {
  std::string a;
  std::string b;
  double down_s = 0;
  std::optional<double> up_s;
  friend bool operator==(const FailureDecl&, const FailureDecl&) = default;
};

struct ScenarioFile {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  double duration_s = 0;
  std::uint64_t seed = 1; ///< repetition i uses seed + i
  std::uint32_t repetitions = 1;
  TopologyDecl topology;
  RoutingDecl routing;
  FamtarDecl famtar;
  WorkloadDecl workload;
  std::vector<FailureDecl> failures;
  friend bool operator==(const ScenarioFile&, const ScenarioFile&) = default;
};

/// Parses and schema-checks a document; unknown keys, wrong types and
/// missing required fields raise ScenarioError.
ScenarioFile parse_scenario(const std::string& text);
ScenarioFile load_scenario(const std::string& path);
std::string serialize_scenario(const ScenarioFile& s);

Topology build_parallel_paths_topology(const ParallelPaths& p);
inline Topology build_parallel_paths_topology(int k) { return build_parallel_paths_topology(ParallelPaths{k}); }

Topology build_topology(const TopologyDecl& decl);

/// Engine configuration for one repetition. Throws ScenarioError on
/// unresolvable names or invalid parameters.
SimConfig build_sim_config(const ScenarioFile& s, std::uint64_t seed);

/// Full pre-run validation: builds the configuration and an engine.
void validate_scenario(const ScenarioFile& s);

}  // namespace famtar
