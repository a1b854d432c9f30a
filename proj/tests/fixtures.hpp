// Scenario documents shared by the engine unit tests and the acceptance run.
#pragma once

#include "famtar/scenario.hpp"

namespace famtar::testing {

/// H1 - R1 - R3 - R2 - R4 - H2 with a costlier R3 - R4 shortcut. The flow
/// starts on R3 -> R2 -> R4; R2 - R4 fails at 1 s. R3 converges quickly and
/// moves to the shortcut, R2 converges late and turns back towards R3, so
/// R3's stale pin towards R2 forms a two-router loop R3 -> R2 -> R3.
inline ScenarioFile loop_scenario(bool loop_resolution, bool famtar = true) {
  ScenarioFile s;
  s.name = "loop-resolution";
  s.duration_s = 3;
  ExplicitTopology t;
  for (const char* h : {"H1", "H2"}) t.nodes.push_back(NodeDecl{h, NodeKind::host, std::nullopt});
  for (const char* r : {"R1", "R2", "R3", "R4"}) t.nodes.push_back(NodeDecl{r, NodeKind::router, std::nullopt});
  auto link = [&t](const char* a, const char* b, std::uint32_t cost, std::uint64_t cap = 10'000'000) {
    t.links.push_back(LinkDecl{a, b, cap, 0.001, cost, 100});
  };
  link("H1", "R1", 10, 100'000'000);
  link("R1", "R3", 10);
  link("R3", "R2", 10);
  link("R2", "R4", 10);
  link("R3", "R4", 30);
  link("R4", "H2", 10, 100'000'000);
  s.topology = t;
  s.routing.spf_delay_overrides_s = {{"R2", 0.050}, {"R3", 0.005}};
  s.famtar.enabled = famtar;
  s.famtar.loop_resolution = loop_resolution;

  FlowSpec f;
  f.src = "H1";
  f.dst = "H2";
  f.rate_bps = 1'000'000;
  f.packet_size = 500;
  f.label = "probe";
  f.src_port = 4000;
  f.track = true;
  s.workload = ExplicitFlows{{f}, 0, std::nullopt};
  s.failures.push_back(FailureDecl{"R2", "R4", 1.0, std::nullopt});
  return s;
}

}  // namespace famtar::testing
