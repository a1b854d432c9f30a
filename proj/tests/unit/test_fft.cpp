#include <doctest.h>

#include <map>
#include <random>
#include <stdexcept>

#include "famtar/fft.hpp"

using namespace famtar;

namespace {

FlowKey key(std::uint16_t sport) { return make_flow_key(0x0a000001, 0x0a000101, sport, 5000, 17); }
FlowValue value(IfaceIndex port, SimTime ts = SimTime{0}, std::uint8_t ttl = 63) {
  return FlowValue{ts, port, 0x0a0000fe, ttl};
}

}  // namespace

TEST_CASE("lookup honours the idle timeout") {
  Fft fft(seconds(10));
  CHECK_FALSE(fft.lookup(key(1), SimTime{0}));
  REQUIRE(fft.insert(key(1), value(2), SimTime{0}) == InsertResult::inserted);
  CHECK(fft.lookup(key(1), seconds(1)) == value(2));
  CHECK(fft.lookup(key(1), seconds(10)));  // idle exactly 10 s: still live
  CHECK_FALSE(fft.lookup(key(1), seconds(10) + SimTime{1}));
  CHECK_FALSE(fft.lookup(key(1), seconds(11)));
}

TEST_CASE("touch refreshes only the timestamp") {
  Fft fft(seconds(10));
  fft.insert(key(1), value(3, seconds(5), 40), seconds(5));
  fft.touch(key(1), seconds(7));
  const auto v = fft.lookup(key(1), seconds(7));
  REQUIRE(v);
  CHECK(v->ts == seconds(7));
  CHECK(v->port == 3);
  CHECK(v->ttl == 40);
  CHECK(v->gateway == 0x0a0000fe);

  Fft f2(seconds(10));
  f2.insert(key(1), value(1), SimTime{0});
  f2.touch(key(1), seconds(9));
  CHECK(f2.lookup(key(1), seconds(18)));
  CHECK_THROWS_AS(f2.touch(key(2), seconds(1)), std::logic_error);
  CHECK_THROWS_AS(f2.touch(key(1), seconds(30)), std::logic_error);
}

TEST_CASE("admission block on an interface") {
  Fft fft;
  fft.block_interface(2, SimTime{0}, seconds(5));
  CHECK(fft.insert(key(1), value(2, seconds(3)), seconds(3)) == InsertResult::blocked);
  CHECK_FALSE(fft.lookup(key(1), seconds(3)));
  CHECK(fft.insert(key(1), value(2, seconds(6)), seconds(6)) == InsertResult::inserted);

  Fft g;
  g.block_interface(4, seconds(10), seconds(5));
  CHECK(g.is_blocked(4, seconds(10)));
  CHECK(g.is_blocked(4, seconds(15) - SimTime{1}));
  CHECK_FALSE(g.is_blocked(4, seconds(15)));
  CHECK_FALSE(g.is_blocked(5, seconds(12)));
  CHECK(g.insert(key(1), value(5, seconds(12)), seconds(12)) == InsertResult::inserted);
  g.block_interface(4, seconds(12), seconds(5));
  CHECK(g.block_expiry(4) == seconds(17));
}

TEST_CASE("lazy garbage collection on insert into the same bucket") {
  Fft fft(seconds(10), 1);  // one bucket: every key collides
  fft.insert(key(1), value(1), SimTime{0});
  fft.insert(key(2), value(1, seconds(8)), seconds(8));
  CHECK(fft.entry_count() == 2);
  // key(1) expired at 11 s but stays stored until the bucket is touched by an insert.
  CHECK(fft.entry_count() == 2);
  CHECK(fft.live_count(seconds(11)) == 1);
  fft.insert(key(3), value(1, seconds(11)), seconds(11));
  CHECK(fft.entry_count() == 2);
  CHECK_FALSE(fft.lookup(key(1), seconds(11)));
  CHECK(fft.lookup(key(2), seconds(11)));
  CHECK(fft.logical_bytes() == 2 * 23);
}

TEST_CASE("inserting over a live entry is a logic error; over an expired one is allowed") {
  Fft fft(seconds(10));
  fft.insert(key(1), value(1), SimTime{0});
  CHECK_THROWS_AS(fft.insert(key(1), value(2, seconds(1)), seconds(1)), std::logic_error);
  CHECK(fft.insert(key(1), value(2, seconds(20)), seconds(20)) == InsertResult::inserted);
  CHECK(fft.lookup(key(1), seconds(20))->port == 2);
  CHECK(fft.entry_count() == 1);
}

TEST_CASE("purge removes exactly the entries pinned to an interface") {
  Fft fft;
  CHECK(fft.purge_interface(1) == 0);
  fft.insert(key(1), value(1), SimTime{0});
  fft.insert(key(2), value(2), SimTime{0});
  fft.insert(key(3), value(1), SimTime{0});
  CHECK(fft.purge_interface(9) == 0);
  CHECK(fft.entry_count() == 3);
  CHECK(fft.purge_interface(1) == 2);
  CHECK(fft.entry_count() == 1);
  CHECK(fft.lookup(key(2), SimTime{0}));
  CHECK_FALSE(fft.lookup(key(1), SimTime{0}));
  CHECK_FALSE(fft.lookup(key(3), SimTime{0}));
}

TEST_CASE("update_entry rewrites routing fields and refreshes the timestamp") {
  Fft fft;
  fft.insert(key(1), value(1), SimTime{0});
  fft.update_entry(key(1), 3, 0x0a000002, 50, seconds(2));
  const auto v = fft.lookup(key(1), seconds(2));
  REQUIRE(v);
  CHECK(v->port == 3);
  CHECK(v->gateway == 0x0a000002);
  CHECK(v->ttl == 50);
  CHECK(v->ts == seconds(2));
  CHECK_THROWS_AS(fft.update_entry(key(9), 1, 0, 1, seconds(2)), std::logic_error);
}

TEST_CASE("footprint scales with stored entries") {
  Fft fft;
  CHECK(fft.logical_bytes() == 0);
  for (std::uint16_t i = 0; i < 100; ++i) fft.insert(key(i), value(1), SimTime{0});
  CHECK(fft.logical_bytes() == 100 * flow_entry_footprint());
}

TEST_CASE("property: table agrees with a reference map under random operations") {
  // Reference model: map key -> value with explicit expiry; same operations.
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t buckets = 1 + rng() % 8;
    Fft fft(seconds(3), buckets);
    std::map<FlowKey, FlowValue> ref;
    std::map<IfaceIndex, SimTime> blocks;
    SimTime now{0};
    auto live = [&](const FlowKey& k) {
      auto it = ref.find(k);
      return it != ref.end() && now - it->second.ts <= seconds(3);
    };
    for (int step = 0; step < 400; ++step) {
      now += SimTime{static_cast<std::int64_t>(rng() % 400'000)};
      const FlowKey k = key(static_cast<std::uint16_t>(rng() % 24));
      const auto port = static_cast<IfaceIndex>(rng() % 4);
      switch (rng() % 5) {
        case 0:
        case 1:
          if (!live(k)) {
            const bool blocked = blocks.count(port) && blocks[port] > now;
            const auto r = fft.insert(k, value(port, now), now);
            CHECK((r == InsertResult::blocked) == blocked);
            if (!blocked) ref[k] = value(port, now);
          }
          break;
        case 2:
          if (live(k)) {
            fft.touch(k, now);
            ref[k].ts = now;
          }
          break;
        case 3: {
          const auto removed = fft.purge_interface(port);
          std::size_t stored = 0;
          std::size_t live_pinned = 0;
          for (auto it = ref.begin(); it != ref.end();) {
            if (it->second.port == port) {
              ++stored;
              if (live(it->first)) ++live_pinned;
              it = ref.erase(it);
            } else {
              ++it;
            }
          }
          // Expired entries may already have been collected by the table.
          CHECK(removed >= live_pinned);
          CHECK(removed <= stored);
          break;
        }
        case 4:
          fft.block_interface(port, now, seconds(1));
          blocks[port] = now + seconds(1);
          break;
      }
      for (std::uint16_t s = 0; s < 24; ++s) {
        const auto got = fft.lookup(key(s), now);
        CHECK(got.has_value() == live(key(s)));
        if (got) CHECK(*got == ref[key(s)]);
      }
    }
  }
}
