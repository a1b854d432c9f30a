// Structured simulator event log. Every appended event is folded into a
// running FNV-1a hash of its JSONL line, so two runs can be compared for
// bit-identical behaviour without keeping both logs.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "famtar/core_model.hpp"

namespace famtar {

enum class DropReason : std::uint8_t { ttl_expired, unreachable, queue_full, link_down };
inline constexpr std::size_t kDropReasonCount = 4;
std::string_view to_string(DropReason r);

enum class LogKind : std::uint8_t {
  drop,
  fft_insert,
  fft_blocked,
  fft_purge,
  fft_rewrite,
  fft_ttl_raise,
  fft_unpin,
  cost_escalate,
  cost_restore,
  link_down,
  link_up,
  route_install,
};
std::string_view to_string(LogKind k);

struct LogEvent {
  SimTime t{0};
  LogKind kind = LogKind::drop;
  NodeId node = kNoNode;
  int iface = -1;
  std::uint32_t flow = 0;
  std::uint64_t packet = 0;
  std::int64_t value = 0; ///< kind-specific: new cost, purge count, TTL, route count
  DropReason reason = DropReason::ttl_expired;
};

class EventLog {
 public:
  explicit EventLog(bool keep_events = true) : keep_(keep_events) {}

  void add(const LogEvent& ev);

  std::uint64_t hash() const { return hash_; }
  std::size_t count() const { return count_; }
  std::size_t count(LogKind k) const { return per_kind_[static_cast<std::size_t>(k)]; }
  const std::vector<LogEvent>& events() const { return events_; }

  /// One JSON object per line; node names resolved through `topo`.
  std::string to_jsonl(const Topology& topo) const;
  static std::string line(const LogEvent& ev);

 private:
  bool keep_;
  std::vector<LogEvent> events_;
  std::uint64_t hash_ = 1469598103934665603ull;
  std::size_t count_ = 0;
  std::array<std::size_t, 12> per_kind_{};
};

}  // namespace famtar
