#include <doctest.h>

#include <stdexcept>

#include "famtar/pipeline.hpp"
#include "support.hpp"

using namespace famtar;
using namespace famtar::testing;

namespace {

// H1 - S - {X, Y} - D - H2; S prefers X on the tie.
struct Diamond {
  Topology topo;
  NodeId h1, s, x, y, d, h2;
  LinkId sx, sy;

  Diamond() {
    h1 = add(topo, "H1", NodeKind::host);
    s = add(topo, "S");
    x = add(topo, "X");
    y = add(topo, "Y");
    d = add(topo, "D");
    h2 = add(topo, "H2", NodeKind::host);
    connect(topo, h1, s, 10, kHundredMbit);
    sx = connect(topo, s, x);
    sy = connect(topo, s, y);
    connect(topo, x, d);
    connect(topo, y, d);
    connect(topo, d, h2, 10, kHundredMbit);
  }
  IfaceIndex s_to_x() const { return topo.iface_of(s, sx); }
  IfaceIndex s_to_y() const { return topo.iface_of(s, sy); }
  DirLinkId out(NodeId from, LinkId l) const { return topo.node(from).ifaces.at(topo.iface_of(from, l)).out; }
  FlowKey flow(std::uint16_t sport) const {
    return make_flow_key(topo.node(h1).addr, topo.node(h2).addr, sport, 5000, 17);
  }
};

IfaceIndex forwarded_iface(const Decision& d) {
  REQUIRE(std::holds_alternative<Forward>(d));
  return std::get<Forward>(d).iface;
}

void reroute_away_from(Router& r, const Diamond& n, LinkId l) {
  r.db().originate(n.out(n.s, l), 10000, true);
  r.install(spf(n.topo, r.db(), n.s));
}

}  // namespace

TEST_CASE("first packet is routed by the table and pinned") {
  Diamond n;
  Router r(n.topo, n.s, FamtarConfig{});
  EventLog log;
  Packet p = packet(n.flow(1), 64);
  const auto d = r.process_packet(p, 0, seconds(1), log);
  CHECK(forwarded_iface(d) == n.s_to_x());
  CHECK(p.ttl == 63);
  const auto entry = r.fft().lookup(n.flow(1), seconds(1));
  REQUIRE(entry);
  CHECK(entry->port == n.s_to_x());
  CHECK(entry->gateway == n.topo.node(n.x).addr);
  CHECK(entry->ttl == 63);
  CHECK(entry->ts == seconds(1));
  CHECK(log.count(LogKind::fft_insert) == 1);
}

TEST_CASE("pinned flows ignore routing changes; new flows follow them") {
  Diamond n;
  Router r(n.topo, n.s, FamtarConfig{});
  EventLog log;
  Packet p1 = packet(n.flow(1), 64);
  r.process_packet(p1, 0, seconds(1), log);
  reroute_away_from(r, n, n.sx);
  REQUIRE(r.table().find(n.h2)->iface == n.s_to_y());

  Packet p2 = packet(n.flow(1), 64);
  CHECK(forwarded_iface(r.process_packet(p2, 0, seconds(2), log)) == n.s_to_x());
  Packet q = packet(n.flow(2), 64);
  CHECK(forwarded_iface(r.process_packet(q, 0, seconds(2), log)) == n.s_to_y());
  // Once idle past the timeout the old flow is re-pinned on its next packet.
  Packet p3 = packet(n.flow(1), 64);
  CHECK(forwarded_iface(r.process_packet(p3, 0, seconds(13), log)) == n.s_to_y());
}

TEST_CASE("ttl expiry and local delivery") {
  Diamond n;
  Router r(n.topo, n.s, FamtarConfig{});
  EventLog log;
  Packet dying = packet(n.flow(1), 1);
  CHECK(std::get<Drop>(r.process_packet(dying, 0, SimTime{0}, log)).reason == DropReason::ttl_expired);
  CHECK(dying.ttl == 0);
  CHECK(r.fft().entry_count() == 0);
  CHECK(log.count() == 0);  // no error signalling, no FFT state

  Packet local = packet(make_flow_key(n.topo.node(n.h1).addr, n.topo.node(n.s).addr, 1, 1, 17), 5);
  CHECK(std::holds_alternative<DeliverLocal>(r.process_packet(local, 0, SimTime{0}, log)));
  CHECK(local.ttl == 5);

  Packet nowhere = packet(make_flow_key(1, parse_address("192.168.9.9"), 1, 1, 17), 64);
  CHECK(std::get<Drop>(r.process_packet(nowhere, 0, SimTime{0}, log)).reason == DropReason::unreachable);
}

TEST_CASE("plain IP mode never touches the FFT") {
  Diamond n;
  FamtarConfig cfg;
  cfg.enabled = false;
  Router r(n.topo, n.s, cfg);
  EventLog log;
  Packet p1 = packet(n.flow(1), 64);
  CHECK(forwarded_iface(r.process_packet(p1, 0, seconds(1), log)) == n.s_to_x());
  reroute_away_from(r, n, n.sx);
  Packet p2 = packet(n.flow(1), 64);
  CHECK(forwarded_iface(r.process_packet(p2, 0, seconds(1), log)) == n.s_to_y());
  CHECK(r.fft().entry_count() == 0);

  r.count_transmitted(n.s_to_y(), 2'000'000);
  CHECK(r.monitor_tick(seconds(1), log).empty());
}

TEST_CASE("ttl-based loop resolution verdicts") {
  Diamond n;
  Router r(n.topo, n.s, FamtarConfig{});
  EventLog log;
  Packet first = packet(n.flow(1), 64);
  r.process_packet(first, 0, seconds(1), log);  // stored ttl 63 via X

  SUBCASE("equal ttl keeps the route") {
    Packet p = packet(n.flow(1), 64);
    LoopVerdict v{};
    p.ttl = 63;
    CHECK(forwarded_iface(r.resolve_loop(p, *r.fft().lookup(p.key, seconds(2)), seconds(2), log, &v)) ==
          n.s_to_x());
    CHECK(v == LoopVerdict::keep);
    CHECK(r.fft().lookup(p.key, seconds(2))->ts == seconds(2));
  }
  SUBCASE("higher ttl raises the stored ttl and keeps the port") {
    Packet p = packet(n.flow(1), 66);
    reroute_away_from(r, n, n.sx);
    CHECK(forwarded_iface(r.process_packet(p, 0, seconds(2), log)) == n.s_to_x());
    CHECK(r.fft().lookup(p.key, seconds(2))->ttl == 65);
    CHECK(log.count(LogKind::fft_ttl_raise) == 1);
  }
  SUBCASE("lower ttl rewrites the entry from the current table") {
    reroute_away_from(r, n, n.sx);
    Packet looped = packet(n.flow(1), 62);  // came back around: 2 hops lower
    CHECK(forwarded_iface(r.process_packet(looped, 0, seconds(2), log)) == n.s_to_y());
    const auto e = r.fft().lookup(looped.key, seconds(2));
    REQUIRE(e);
    CHECK(e->port == n.s_to_y());
    CHECK(e->gateway == n.topo.node(n.y).addr);
    CHECK(e->ttl == 61);
    CHECK(log.count(LogKind::fft_rewrite) == 1);
    // Regular traffic from upstream now raises the TTL but stays on Y.
    Packet next = packet(n.flow(1), 64);
    CHECK(forwarded_iface(r.process_packet(next, 0, seconds(2), log)) == n.s_to_y());
    CHECK(r.fft().lookup(next.key, seconds(2))->ttl == 63);
  }
  SUBCASE("rewrite towards a blocked interface unpins the flow") {
    r.fft().block_interface(n.s_to_y(), seconds(1), seconds(5));
    reroute_away_from(r, n, n.sx);
    Packet looped = packet(n.flow(1), 62);
    LoopVerdict v{};
    const auto d = r.resolve_loop(looped, *r.fft().lookup(looped.key, seconds(2)), seconds(2), log, &v);
    CHECK(v == LoopVerdict::unpin);
    CHECK(forwarded_iface(d) == n.s_to_y());
    CHECK_FALSE(r.fft().lookup(looped.key, seconds(2)));
  }
  SUBCASE("rewrite without any route drops and forgets the flow") {
    r.db().originate(n.out(n.s, n.sx), 10, false);
    r.db().originate(n.out(n.s, n.sy), 10, false);
    r.install(spf(n.topo, r.db(), n.s));
    Packet looped = packet(n.flow(1), 62);
    LoopVerdict v{};
    const auto d = r.resolve_loop(looped, *r.fft().lookup(looped.key, seconds(2)), seconds(2), log, &v);
    CHECK(v == LoopVerdict::unreachable);
    CHECK(std::get<Drop>(d).reason == DropReason::unreachable);
    CHECK(r.fft().entry_count() == 0);
  }
}

TEST_CASE("loop resolution can be switched off") {
  Diamond n;
  FamtarConfig cfg;
  cfg.loop_resolution = false;
  Router r(n.topo, n.s, cfg);
  EventLog log;
  Packet first = packet(n.flow(1), 64);
  r.process_packet(first, 0, seconds(1), log);
  reroute_away_from(r, n, n.sx);
  Packet looped = packet(n.flow(1), 62);
  CHECK(forwarded_iface(r.process_packet(looped, 0, seconds(2), log)) == n.s_to_x());
  CHECK(r.fft().lookup(looped.key, seconds(2))->ttl == 63);
}

TEST_CASE("load monitor escalates and restores with hysteresis") {
  Diamond n;
  Router r(n.topo, n.s, FamtarConfig{});
  EventLog log;
  const IfaceIndex i = n.s_to_x();
  const DirLinkId out = n.out(n.s, n.sx);

  CHECK(r.monitor_tick(seconds(1), log).empty());  // idle

  r.count_transmitted(i, 9'500'000 / 8);  // 9.5 Mbit in 1 s on 10 Mbit/s
  auto changes = r.monitor_tick(seconds(2), log);
  REQUIRE(changes.size() == 1);
  CHECK(changes[0].dirlink == out);
  CHECK(changes[0].record.cost == 10000);
  CHECK(changes[0].record.up);
  CHECK(r.db().at(out).cost == 10000);
  CHECK(r.interfaces()[i].congested);

  r.count_transmitted(i, 8'000'000 / 8);  // 0.8: between thresholds
  CHECK(r.monitor_tick(seconds(3), log).empty());

  r.count_transmitted(i, 6'000'000 / 8);  // 0.6 <= 0.7
  changes = r.monitor_tick(seconds(4), log);
  REQUIRE(changes.size() == 1);
  CHECK(changes[0].record.cost == 10);
  CHECK(changes[0].record.version == 2);
  CHECK_FALSE(r.interfaces()[i].congested);
  CHECK(log.count(LogKind::cost_escalate) == 1);
  CHECK(log.count(LogKind::cost_restore) == 1);

  // Exactly at the threshold escalates; counters reset every tick.
  r.count_transmitted(i, 9'000'000 / 8);
  CHECK(r.monitor_tick(seconds(5), log).size() == 1);
  CHECK(r.monitor_tick(seconds(6), log).size() == 1);  // 0 load restores
}

TEST_CASE("symmetric escalation also raises the reverse direction") {
  Diamond n;
  FamtarConfig cfg;
  cfg.symmetric_escalation = true;
  Router r(n.topo, n.s, cfg);
  EventLog log;
  r.count_transmitted(n.s_to_x(), 10'000'000 / 8);
  const auto changes = r.monitor_tick(seconds(1), log);
  REQUIRE(changes.size() == 2);
  CHECK(changes[1].dirlink == Topology::reverse_of(changes[0].dirlink));
}

TEST_CASE("monitor configuration validation") {
  MonitorConfig m;
  CHECK_NOTHROW(m.validate());
  m.clear_threshold = 0.95;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = MonitorConfig{};
  m.congest_threshold = 1.2;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m = MonitorConfig{};
  m.period = SimTime{0};
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("carrier loss purges, blocks and advertises the link down") {
  Diamond n;
  Router r(n.topo, n.s, FamtarConfig{});
  EventLog log;
  for (std::uint16_t f = 1; f <= 3; ++f) {
    Packet p = packet(n.flow(f), 64);
    r.process_packet(p, 0, seconds(9), log);
  }
  REQUIRE(r.fft().entry_count() == 3);

  const auto changes = r.on_link_down(n.s_to_x(), seconds(10), log);
  REQUIRE(changes.size() == 1);
  CHECK_FALSE(changes[0].record.up);
  CHECK(r.fft().entry_count() == 0);
  CHECK(r.fft().block_expiry(n.s_to_x()) == seconds(15));

  // Until SPF runs the table still points at the dead interface: packets are
  // forwarded by the table and nothing new is pinned there.
  Packet p = packet(n.flow(7), 64);
  CHECK(forwarded_iface(r.process_packet(p, 0, seconds(10) + millis(1), log)) == n.s_to_x());
  CHECK(r.fft().entry_count() == 0);
  CHECK(log.count(LogKind::fft_blocked) == 1);

  // Link comes back at 12 s; the block still runs to 15 s.
  const auto up = r.on_link_up(n.s_to_x(), seconds(12), log);
  REQUIRE(up.size() == 1);
  CHECK(up[0].record.up);
  CHECK(up[0].record.cost == 10);
  CHECK(r.fft().entry_count() == 0);
  r.install(spf(n.topo, r.db(), n.s));
  Packet before = packet(n.flow(8), 64);
  r.process_packet(before, 0, seconds(14), log);
  CHECK_FALSE(r.fft().lookup(before.key, seconds(14)));
  Packet after = packet(n.flow(9), 64);
  r.process_packet(after, 0, seconds(15), log);
  CHECK(r.fft().lookup(after.key, seconds(15)));
}

TEST_CASE("carrier loss on an idle router still blocks") {
  Diamond n;
  Router r(n.topo, n.s, FamtarConfig{});
  EventLog log;
  r.on_link_down(n.s_to_y(), seconds(3), log);
  CHECK(log.events().back().kind == LogKind::fft_purge);
  CHECK(log.events().back().value == 0);
  CHECK(r.fft().is_blocked(n.s_to_y(), seconds(4)));
}

TEST_CASE("congested-link avoidance for flows arriving after convergence") {
  Diamond n;
  Router r(n.topo, n.s, FamtarConfig{});
  EventLog log;
  Packet old_flow = packet(n.flow(1), 64);
  r.process_packet(old_flow, 0, seconds(1), log);
  r.count_transmitted(n.s_to_x(), 10'000'000 / 8);
  r.monitor_tick(seconds(2), log);
  r.install(spf(n.topo, r.db(), n.s));
  for (std::uint16_t f = 2; f < 20; ++f) {
    Packet p = packet(n.flow(f), 64);
    CHECK(forwarded_iface(r.process_packet(p, 0, seconds(2), log)) == n.s_to_y());
  }
  Packet again = packet(n.flow(1), 64);
  CHECK(forwarded_iface(r.process_packet(again, 0, seconds(2), log)) == n.s_to_x());
}
