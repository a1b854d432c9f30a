// Flow Forwarding Table: hash-chain array from FlowKey to FlowValue with
// bucket-local garbage collection on insert and a per-interface admission
// block used after carrier loss.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "famtar/core_model.hpp"

namespace famtar {

enum class InsertResult { inserted, blocked };

class Fft {
 public:
  static constexpr std::size_t kDefaultBuckets = 4096;

  explicit Fft(SimTime timeout = seconds(10), std::size_t bucket_count = kDefaultBuckets);

  /// Live entry for `key`, or nullopt when absent or idle for longer than
  /// the timeout. Never modifies the entry.
  std::optional<FlowValue> lookup(const FlowKey& key, SimTime now) const;

  /// Refreshes the entry timestamp. Throws std::logic_error when the entry
  /// is absent or expired.
  void touch(const FlowKey& key, SimTime now);

  /// Stores `value` unless its port is blocked at `now`. Expired entries in
  /// the target bucket are collected first. Throws std::logic_error if a live
  /// entry for `key` already exists.
  InsertResult insert(const FlowKey& key, FlowValue value, SimTime now);

  /// Blocks inserts on `iface` during [now, now + duration). Re-blocking
  /// overwrites the previous expiry.
  void block_interface(IfaceIndex iface, SimTime now, SimTime duration);
  bool is_blocked(IfaceIndex iface, SimTime now) const;
  std::optional<SimTime> block_expiry(IfaceIndex iface) const;

  /// Removes every entry pinned to `iface`; returns how many were removed.
  std::size_t purge_interface(IfaceIndex iface);

  /// Rewrites routing fields of a present entry and refreshes its timestamp.
  /// Throws std::logic_error when absent.
  void update_entry(const FlowKey& key, IfaceIndex new_port, Address new_gateway,
                    std::uint8_t new_ttl, SimTime now);

  /// Raises the stored TTL without touching routing fields.
  void set_ttl(const FlowKey& key, std::uint8_t ttl, SimTime now);

  bool erase(const FlowKey& key);

  /// Full-table garbage collection; returns entries removed. Only for
  /// end-of-run accounting, lookups behave the same with or without it.
  std::size_t sweep(SimTime now);

  /// Stored entries, including expired ones not yet collected.
  std::size_t entry_count() const { return entry_count_; }
  std::size_t live_count(SimTime now) const;
  std::size_t logical_bytes() const { return entry_count_ * flow_entry_footprint(); }
  std::size_t bucket_count() const { return buckets_.size(); }
  std::size_t bucket_of(const FlowKey& key) const;
  SimTime timeout() const { return timeout_; }

  /// CSV rows "src,dst,sport,dport,proto,ts_us,port,gateway,ttl" sorted by key.
  std::string dump_csv() const;

 private:
  using Entry = std::pair<FlowKey, FlowValue>;

  bool expired(const FlowValue& v, SimTime now) const { return now - v.ts > timeout_; }
  Entry* find(const FlowKey& key);
  const Entry* find(const FlowKey& key) const;

  SimTime timeout_;
  std::vector<std::vector<Entry>> buckets_;
  std::map<IfaceIndex, SimTime> blocked_;
  std::size_t entry_count_ = 0;
};

}  // namespace famtar
