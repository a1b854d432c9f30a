#include "famtar/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace famtar {

using nlohmann::json;

namespace {

/// Strict object reader: every present key has to be consumed by get/opt,
/// anything left over is reported by finish().
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  template <typename T>
  T get(const std::string& key) {
    if (!j_.contains(key)) fail(path_ + "." + key, "missing required field");
    return convert<T>(key);
  }

  template <typename T>
  void opt(const std::string& key, T& out) {
    if (j_.contains(key)) out = convert<T>(key);
  }

  template <typename T>
  void opt(const std::string& key, std::optional<T>& out) {
    if (j_.contains(key) && !j_.at(key).is_null()) out = convert<T>(key);
    else seen_.insert(key);
  }

  const json& child(const std::string& key) {
    if (!j_.contains(key)) fail(path_ + "." + key, "missing required field");
    seen_.insert(key);
    return j_.at(key);
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) fail(path_ + "." + k, "unknown field");
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ScenarioError(where + ": " + what);
  }

 private:
  template <typename T>
  T convert(const std::string& key) {
    seen_.insert(key);
    const json& v = j_.at(key);
    const std::string where = path_ + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(where, "expected a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(where, "expected a string");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(where, "expected an integer");
      if (v.is_number_unsigned()) {
        if (v.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<T>::max()))
          fail(where, "out of range");
      } else {
        const auto x = v.get<std::int64_t>();
        if (x < static_cast<std::int64_t>(std::numeric_limits<T>::min()) ||
            (x > 0 && static_cast<std::uint64_t>(x) > static_cast<std::uint64_t>(std::numeric_limits<T>::max())))
          fail(where, "out of range");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(where, "expected a number");
    }
    return v.get<T>();
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string kind_name(NodeKind k) { return k == NodeKind::host ? "host" : "router"; }

NodeKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "host") return NodeKind::host;
  if (s == "router") return NodeKind::router;
  Reader::fail(where, "expected \"host\" or \"router\"");
}

json flow_to_json(const FlowSpec& f) {
  json j{{"src", f.src},
         {"dst", f.dst},
         {"rate_bps", f.rate_bps},
         {"packet_size", f.packet_size},
         {"header_bytes", f.header_bytes},
         {"start_s", to_seconds(f.start)},
         {"label", f.label},
         {"ttl", f.ttl_initial},
         {"src_port", f.src_port},
         {"dst_port", f.dst_port},
         {"protocol", f.protocol},
         {"track", f.track}};
  if (f.stop) j["stop_s"] = to_seconds(*f.stop);
  if (f.size_bytes) j["size_bytes"] = *f.size_bytes;
  return j;
}

FlowSpec flow_from_json(const json& j, const std::string& path) {
  Reader r(j, path);
  FlowSpec f;
  f.src = r.get<std::string>("src");
  f.dst = r.get<std::string>("dst");
  f.rate_bps = r.get<std::uint64_t>("rate_bps");
  f.packet_size = r.get<std::uint32_t>("packet_size");
  r.opt("header_bytes", f.header_bytes);
  f.start = seconds(r.get<double>("start_s"));
  std::optional<double> stop;
  r.opt("stop_s", stop);
  if (stop) f.stop = seconds(*stop);
  r.opt("size_bytes", f.size_bytes);
  r.opt("label", f.label);
  r.opt("ttl", f.ttl_initial);
  r.opt("src_port", f.src_port);
  r.opt("dst_port", f.dst_port);
  r.opt("protocol", f.protocol);
  r.opt("track", f.track);
  r.finish();
  return f;
}

json topology_to_json(const TopologyDecl& t) {
  if (const auto* p = std::get_if<ParallelPaths>(&t)) {
    return json{{"builder", "parallel_paths"},
                {"paths", p->paths},
                {"transit_per_path", p->transit_per_path},
                {"core_capacity_bps", p->core_capacity_bps},
                {"edge_capacity_bps", p->edge_capacity_bps},
                {"delay_s", p->delay_s},
                {"cost", p->cost},
                {"queue_packets", p->queue_packets}};
  }
  const auto& e = std::get<ExplicitTopology>(t);
  json nodes = json::array();
  for (const auto& n : e.nodes) {
    json jn{{"name", n.name}, {"kind", kind_name(n.kind)}};
    if (n.address) jn["address"] = *n.address;
    nodes.push_back(std::move(jn));
  }
  json links = json::array();
  for (const auto& l : e.links)
    links.push_back(json{{"a", l.a},
                         {"b", l.b},
                         {"capacity_bps", l.capacity_bps},
                         {"delay_s", l.delay_s},
                         {"cost", l.cost},
                         {"queue_packets", l.queue_packets}});
  return json{{"nodes", std::move(nodes)}, {"links", std::move(links)}};
}

TopologyDecl topology_from_json(const json& j) {
  Reader r(j, "topology");
  if (r.has("builder")) {
    const auto builder = r.get<std::string>("builder");
    if (builder != "parallel_paths") Reader::fail("topology.builder", "unknown builder '" + builder + "'");
    ParallelPaths p;
    p.paths = r.get<int>("paths");
    r.opt("transit_per_path", p.transit_per_path);
    r.opt("core_capacity_bps", p.core_capacity_bps);
    r.opt("edge_capacity_bps", p.edge_capacity_bps);
    r.opt("delay_s", p.delay_s);
    r.opt("cost", p.cost);
    r.opt("queue_packets", p.queue_packets);
    r.finish();
    return p;
  }
  ExplicitTopology e;
  const json& nodes = r.child("nodes");
  if (!nodes.is_array()) Reader::fail("topology.nodes", "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = "topology.nodes[" + std::to_string(i) + "]";
    Reader n(nodes[i], path);
    NodeDecl d;
    d.name = n.get<std::string>("name");
    d.kind = parse_kind(n.get<std::string>("kind"), path + ".kind");
    n.opt("address", d.address);
    n.finish();
    e.nodes.push_back(std::move(d));
  }
  const json& links = r.child("links");
  if (!links.is_array()) Reader::fail("topology.links", "expected an array");
  for (std::size_t i = 0; i < links.size(); ++i) {
    Reader l(links[i], "topology.links[" + std::to_string(i) + "]");
    LinkDecl d;
    d.a = l.get<std::string>("a");
    d.b = l.get<std::string>("b");
    l.opt("capacity_bps", d.capacity_bps);
    l.opt("delay_s", d.delay_s);
    l.opt("cost", d.cost);
    l.opt("queue_packets", d.queue_packets);
    l.finish();
    e.links.push_back(std::move(d));
  }
  r.finish();
  return e;
}

json workload_to_json(const WorkloadDecl& w) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Scenario1Params>) {
          return json{{"type", "scenario1"},
                      {"flows", p.flows},
                      {"packet_size", p.packet_size},
                      {"rate_bps", p.rate_bps},
                      {"pareto_mean_bytes", p.pareto_mean_bytes},
                      {"pareto_shape", p.pareto_shape},
                      {"truncate_bytes", p.truncate_bytes},
                      {"mean_interstart_s", p.mean_interstart_s},
                      {"window_start_s", p.window_start_s},
                      {"window_end_s", p.window_end_s},
                      {"src", p.src},
                      {"dst", p.dst}};
        } else if constexpr (std::is_same_v<T, Scenario3Params>) {
          return json{{"type", "scenario3"},
                      {"voip_payload_bps", p.voip_payload_bps},
                      {"voip_payload_bytes", p.voip_payload_bytes},
                      {"voip_header_bytes", p.voip_header_bytes},
                      {"background_rate_bps", p.background_rate_bps},
                      {"background_packet_size", p.background_packet_size},
                      {"first_group", p.first_group},
                      {"first_group_start_s", p.first_group_start_s},
                      {"second_group", p.second_group},
                      {"second_group_start_s", p.second_group_start_s},
                      {"second_group_stop_s", p.second_group_stop_s},
                      {"spacing_s", p.spacing_s},
                      {"duration_s", p.duration_s},
                      {"src", p.src},
                      {"dst", p.dst}};
        } else if constexpr (std::is_same_v<T, Scenario4Params>) {
          return json{{"type", "scenario4"},   {"rate_bps", p.rate_bps}, {"packet_size", p.packet_size},
                      {"start_s", p.start_s},  {"duration_s", p.duration_s}, {"src", p.src},
                      {"dst", p.dst}};
        } else {
          json flows = json::array();
          for (const auto& f : p.flows) flows.push_back(flow_to_json(f));
          json j{{"type", "flows"}, {"flows", std::move(flows)}, {"window_start_s", p.window_start_s}};
          if (p.window_end_s) j["window_end_s"] = *p.window_end_s;
          return j;
        }
      },
      w);
}

WorkloadDecl workload_from_json(const json& j) {
  Reader r(j, "workload");
  const auto type = r.get<std::string>("type");
  if (type == "scenario1") {
    Scenario1Params p;
    r.opt("flows", p.flows);
    r.opt("packet_size", p.packet_size);
    r.opt("rate_bps", p.rate_bps);
    r.opt("pareto_mean_bytes", p.pareto_mean_bytes);
    r.opt("pareto_shape", p.pareto_shape);
    r.opt("truncate_bytes", p.truncate_bytes);
    r.opt("mean_interstart_s", p.mean_interstart_s);
    r.opt("window_start_s", p.window_start_s);
    r.opt("window_end_s", p.window_end_s);
    r.opt("src", p.src);
    r.opt("dst", p.dst);
    r.finish();
    return p;
  }
  if (type == "scenario3") {
    Scenario3Params p;
    r.opt("voip_payload_bps", p.voip_payload_bps);
    r.opt("voip_payload_bytes", p.voip_payload_bytes);
    r.opt("voip_header_bytes", p.voip_header_bytes);
    r.opt("background_rate_bps", p.background_rate_bps);
    r.opt("background_packet_size", p.background_packet_size);
    r.opt("first_group", p.first_group);
    r.opt("first_group_start_s", p.first_group_start_s);
    r.opt("second_group", p.second_group);
    r.opt("second_group_start_s", p.second_group_start_s);
    r.opt("second_group_stop_s", p.second_group_stop_s);
    r.opt("spacing_s", p.spacing_s);
    r.opt("duration_s", p.duration_s);
    r.opt("src", p.src);
    r.opt("dst", p.dst);
    r.finish();
    return p;
  }
  if (type == "scenario4") {
    Scenario4Params p;
    r.opt("rate_bps", p.rate_bps);
    r.opt("packet_size", p.packet_size);
    r.opt("start_s", p.start_s);
    r.opt("duration_s", p.duration_s);
    r.opt("src", p.src);
    r.opt("dst", p.dst);
    r.finish();
    return p;
  }
  if (type == "flows") {
    ExplicitFlows p;
    const json& flows = r.child("flows");
    if (!flows.is_array()) Reader::fail("workload.flows", "expected an array");
    for (std::size_t i = 0; i < flows.size(); ++i)
      p.flows.push_back(flow_from_json(flows[i], "workload.flows[" + std::to_string(i) + "]"));
    r.opt("window_start_s", p.window_start_s);
    r.opt("window_end_s", p.window_end_s);
    r.finish();
    return p;
  }
  Reader::fail("workload.type", "unknown workload type '" + type + "'");
}

Address auto_address(NodeId id) { return parse_address("10.0.0.0") + id + 1; }

SimTime checked_time(double s, const std::string& what) {
  if (!std::isfinite(s) || s < 0) throw ScenarioError(what + ": must be a non-negative number of seconds");
  return seconds(s);
}

}  // namespace

ScenarioFile parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("malformed JSON: ") + e.what());
  }
  Reader r(j, "scenario");
  ScenarioFile s;
  s.schema_version = r.get<int>("schema_version");
  if (s.schema_version != kScenarioSchemaVersion)
    Reader::fail("scenario.schema_version", "unsupported version " + std::to_string(s.schema_version));
  s.name = r.get<std::string>("name");
  s.duration_s = r.get<double>("duration_s");
  r.opt("seed", s.seed);
  r.opt("repetitions", s.repetitions);
  s.topology = topology_from_json(r.child("topology"));

  if (r.has("routing")) {
    Reader rr(r.child("routing"), "routing");
    rr.opt("flood_hop_delay_s", s.routing.flood_hop_delay_s);
    rr.opt("spf_delay_s", s.routing.spf_delay_s);
    if (rr.has("spf_delay_overrides_s")) {
      const json& o = rr.child("spf_delay_overrides_s");
      if (!o.is_object()) Reader::fail("routing.spf_delay_overrides_s", "expected an object");
      for (const auto& [k, v] : o.items()) {
        if (!v.is_number()) Reader::fail("routing.spf_delay_overrides_s." + k, "expected a number");
        s.routing.spf_delay_overrides_s[k] = v.get<double>();
      }
    }
    rr.opt("high_cost", s.routing.high_cost);
    rr.opt("symmetric_escalation", s.routing.symmetric_escalation);
    rr.finish();
  }
  if (r.has("famtar")) {
    Reader f(r.child("famtar"), "famtar");
    f.opt("enabled", s.famtar.enabled);
    f.opt("congest_threshold", s.famtar.congest_threshold);
    f.opt("clear_threshold", s.famtar.clear_threshold);
    f.opt("flow_timeout_s", s.famtar.flow_timeout_s);
    f.opt("block_duration_s", s.famtar.block_duration_s);
    f.opt("fft_buckets", s.famtar.fft_buckets);
    f.opt("loop_resolution", s.famtar.loop_resolution);
    f.opt("monitor_period_s", s.famtar.monitor_period_s);
    f.opt("monitor_stagger_s", s.famtar.monitor_stagger_s);
    f.finish();
  }
  s.workload = workload_from_json(r.child("workload"));
  if (r.has("failures")) {
    const json& fl = r.child("failures");
    if (!fl.is_array()) Reader::fail("scenario.failures", "expected an array");
    for (std::size_t i = 0; i < fl.size(); ++i) {
      Reader fr(fl[i], "failures[" + std::to_string(i) + "]");
      FailureDecl d;
      d.a = fr.get<std::string>("a");
      d.b = fr.get<std::string>("b");
      d.down_s = fr.get<double>("down_s");
      fr.opt("up_s", d.up_s);
      fr.finish();
      s.failures.push_back(std::move(d));
    }
  }
  r.finish();
  return s;
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const ScenarioError& e) {
    throw ScenarioError(path + ": " + e.what());
  }
}

std::string serialize_scenario(const ScenarioFile& s) {
  json overrides = json::object();
  for (const auto& [k, v] : s.routing.spf_delay_overrides_s) overrides[k] = v;
  json failures = json::array();
  for (const auto& f : s.failures) {
    json jf{{"a", f.a}, {"b", f.b}, {"down_s", f.down_s}};
    if (f.up_s) jf["up_s"] = *f.up_s;
    failures.push_back(std::move(jf));
  }
  json j{{"schema_version", s.schema_version},
         {"name", s.name},
         {"duration_s", s.duration_s},
         {"seed", s.seed},
         {"repetitions", s.repetitions},
         {"topology", topology_to_json(s.topology)},
         {"routing",
          {{"flood_hop_delay_s", s.routing.flood_hop_delay_s},
           {"spf_delay_s", s.routing.spf_delay_s},
           {"spf_delay_overrides_s", std::move(overrides)},
           {"high_cost", s.routing.high_cost},
           {"symmetric_escalation", s.routing.symmetric_escalation}}},
         {"famtar",
          {{"enabled", s.famtar.enabled},
           {"congest_threshold", s.famtar.congest_threshold},
           {"clear_threshold", s.famtar.clear_threshold},
           {"flow_timeout_s", s.famtar.flow_timeout_s},
           {"block_duration_s", s.famtar.block_duration_s},
           {"fft_buckets", s.famtar.fft_buckets},
           {"loop_resolution", s.famtar.loop_resolution},
           {"monitor_period_s", s.famtar.monitor_period_s},
           {"monitor_stagger_s", s.famtar.monitor_stagger_s}}},
         {"workload", workload_to_json(s.workload)},
         {"failures", std::move(failures)}};
  return j.dump(2) + "\n";
}

Topology build_parallel_paths_topology(const ParallelPaths& p) {
  if (p.paths < 1 || p.paths > 4) throw ScenarioError("parallel_paths: paths must be in [1, 4]");
  if (p.transit_per_path < 0) throw ScenarioError("parallel_paths: transit_per_path must be >= 0");
  const SimTime delay = checked_time(p.delay_s, "parallel_paths.delay_s");
  Topology t;
  auto add = [&t](const std::string& name, NodeKind kind) {
    return t.add_node(name, kind, auto_address(static_cast<NodeId>(t.nodes().size())));
  };
  const NodeId h1 = add("H1", NodeKind::host);
  const NodeId h2 = add("H2", NodeKind::host);
  const NodeId ingress = add("R1", NodeKind::router);
  const NodeId egress = add("R4", NodeKind::router);
  t.add_link(h1, ingress, p.edge_capacity_bps, delay, p.cost, p.queue_packets);
  t.add_link(egress, h2, p.edge_capacity_bps, delay, p.cost, p.queue_packets);
  for (int path = 1; path <= p.paths; ++path) {
    NodeId prev = ingress;
    for (int hop = 1; hop <= p.transit_per_path; ++hop) {
      std::string name = "P" + std::to_string(path);
      if (p.transit_per_path > 1) name += "." + std::to_string(hop);
      const NodeId n = add(name, NodeKind::router);
      t.add_link(prev, n, p.core_capacity_bps, delay, p.cost, p.queue_packets);
      prev = n;
    }
    t.add_link(prev, egress, p.core_capacity_bps, delay, p.cost, p.queue_packets);
  }
  return t;
}

Topology build_topology(const TopologyDecl& decl) {
  if (const auto* p = std::get_if<ParallelPaths>(&decl)) return build_parallel_paths_topology(*p);
  const auto& e = std::get<ExplicitTopology>(decl);
  Topology t;
  try {
    for (const auto& n : e.nodes) {
      const auto id = static_cast<NodeId>(t.nodes().size());
      t.add_node(n.name, n.kind, n.address ? parse_address(*n.address) : auto_address(id));
    }
    for (std::size_t i = 0; i < e.links.size(); ++i) {
      const auto& l = e.links[i];
      const auto a = t.find(l.a);
      const auto b = t.find(l.b);
      if (!a || !b) throw ScenarioError("topology.links[" + std::to_string(i) + "]: unknown node");
      t.add_link(*a, *b, l.capacity_bps, checked_time(l.delay_s, "topology.links.delay_s"), l.cost, l.queue_packets);
    }
  } catch (const std::invalid_argument& ex) {
    throw ScenarioError(std::string("topology: ") + ex.what());
  }
  return t;
}

SimConfig build_sim_config(const ScenarioFile& s, std::uint64_t seed) {
  SimConfig cfg;
  cfg.topology = build_topology(s.topology);
  try {
    cfg.topology.validate();
  } catch (const std::invalid_argument& ex) {
    throw ScenarioError(std::string("topology: ") + ex.what());
  }
  cfg.duration = checked_time(s.duration_s, "scenario.duration_s");
  if (cfg.duration.count() <= 0) throw ScenarioError("scenario.duration_s: must be positive");

  cfg.routing.flood_hop_delay = checked_time(s.routing.flood_hop_delay_s, "routing.flood_hop_delay_s");
  cfg.routing.spf_delay = checked_time(s.routing.spf_delay_s, "routing.spf_delay_s");
  for (const auto& [name, d] : s.routing.spf_delay_overrides_s) {
    const auto id = cfg.topology.find(name);
    if (!id || cfg.topology.node(*id).kind != NodeKind::router)
      throw ScenarioError("routing.spf_delay_overrides_s: unknown router '" + name + "'");
    cfg.routing.spf_delay_override[*id] = checked_time(d, "routing.spf_delay_overrides_s." + name);
  }

  cfg.famtar.enabled = s.famtar.enabled;
  cfg.famtar.monitor.period = checked_time(s.famtar.monitor_period_s, "famtar.monitor_period_s");
  cfg.famtar.monitor.stagger = checked_time(s.famtar.monitor_stagger_s, "famtar.monitor_stagger_s");
  cfg.famtar.monitor.congest_threshold = s.famtar.congest_threshold;
  cfg.famtar.monitor.clear_threshold = s.famtar.clear_threshold;
  cfg.famtar.monitor.high_cost = s.routing.high_cost;
  cfg.famtar.flow_timeout = checked_time(s.famtar.flow_timeout_s, "famtar.flow_timeout_s");
  cfg.famtar.block_duration = checked_time(s.famtar.block_duration_s, "famtar.block_duration_s");
  cfg.famtar.fft_buckets = s.famtar.fft_buckets;
  cfg.famtar.loop_resolution = s.famtar.loop_resolution;
  cfg.famtar.symmetric_escalation = s.routing.symmetric_escalation;
  try {
    cfg.famtar.validate();
  } catch (const std::invalid_argument& ex) {
    throw ScenarioError(std::string("famtar: ") + ex.what());
  }

  cfg.workload = std::visit(
      [&](const auto& p) -> WorkloadSpec {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Scenario1Params>) {
          return gen_scenario1_workload(seed, p);
        } else if constexpr (std::is_same_v<T, Scenario3Params>) {
          return gen_scenario3_workload(p);
        } else if constexpr (std::is_same_v<T, Scenario4Params>) {
          return gen_scenario4_workload(p);
        } else {
          WorkloadSpec w;
          w.flows = p.flows;
          w.window_start = checked_time(p.window_start_s, "workload.window_start_s");
          w.window_end = p.window_end_s ? checked_time(*p.window_end_s, "workload.window_end_s") : cfg.duration;
          return w;
        }
      },
      s.workload);

  for (std::size_t i = 0; i < s.failures.size(); ++i) {
    const auto& f = s.failures[i];
    const std::string where = "failures[" + std::to_string(i) + "]";
    const auto a = cfg.topology.find(f.a);
    const auto b = cfg.topology.find(f.b);
    if (!a || !b) throw ScenarioError(where + ": unknown node");
    const auto link = cfg.topology.find_link(*a, *b);
    if (!link) throw ScenarioError(where + ": no link " + f.a + "-" + f.b);
    FailureSpec spec{*link, checked_time(f.down_s, where + ".down_s"), std::nullopt};
    if (f.up_s) spec.up = checked_time(*f.up_s, where + ".up_s");
    cfg.failures.push_back(spec);
  }
  return cfg;
}

void validate_scenario(const ScenarioFile& s) {
  auto cfg = build_sim_config(s, s.seed);
  try {
    Engine engine(std::move(cfg));
  } catch (const std::invalid_argument& ex) {
    throw ScenarioError(ex.what());
  }
}

}  // namespace famtar
