#include "famtar/fft.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace famtar {

Fft::Fft(SimTime timeout, std::size_t bucket_count) : timeout_(timeout), buckets_(bucket_count) {
  if (bucket_count == 0) throw std::invalid_argument("FFT needs at least one bucket");
  if (timeout.count() <= 0) throw std::invalid_argument("FFT timeout must be positive");
}

std::size_t Fft::bucket_of(const FlowKey& key) const { return std::hash<FlowKey>{}(key) % buckets_.size(); }

Fft::Entry* Fft::find(const FlowKey& key) {
  for (auto& e : buckets_[bucket_of(key)])
    if (e.first == key) return &e;
  return nullptr;
}

const Fft::Entry* Fft::find(const FlowKey& key) const {
  for (const auto& e : buckets_[bucket_of(key)])
    if (e.first == key) return &e;
  return nullptr;
}

std::optional<FlowValue> Fft::lookup(const FlowKey& key, SimTime now) const {
  const Entry* e = find(key);
  if (e == nullptr || expired(e->second, now)) return std::nullopt;
  return e->second;
}

void Fft::touch(const FlowKey& key, SimTime now) {
  Entry* e = find(key);
  if (e == nullptr || expired(e->second, now)) throw std::logic_error("touch on absent or expired FFT entry");
  e->second.ts = std::max(e->second.ts, now);
}

InsertResult Fft::insert(const FlowKey& key, FlowValue value, SimTime now) {
  if (is_blocked(value.port, now)) return InsertResult::blocked;
  auto& bucket = buckets_[bucket_of(key)];
  const auto before = bucket.size();
  std::erase_if(bucket, [&](const Entry& e) { return expired(e.second, now); });
  entry_count_ -= before - bucket.size();
  for (const auto& e : bucket)
    if (e.first == key) throw std::logic_error("insert over a live FFT entry");
  value.ts = now;
  bucket.emplace_back(key, value);
  ++entry_count_;
  return InsertResult::inserted;
}

void Fft::block_interface(IfaceIndex iface, SimTime now, SimTime duration) { blocked_[iface] = now + duration; }

bool Fft::is_blocked(IfaceIndex iface, SimTime now) const {
  auto it = blocked_.find(iface);
  return it != blocked_.end() && it->second > now;
}

std::optional<SimTime> Fft::block_expiry(IfaceIndex iface) const {
  auto it = blocked_.find(iface);
  if (it == blocked_.end()) return std::nullopt;
  return it->second;
}

std::size_t Fft::purge_interface(IfaceIndex iface) {
  std::size_t removed = 0;
  for (auto& bucket : buckets_)
    removed += std::erase_if(bucket, [iface](const Entry& e) { return e.second.port == iface; });
  entry_count_ -= removed;
  return removed;
}

void Fft::update_entry(const FlowKey& key, IfaceIndex new_port, Address new_gateway, std::uint8_t new_ttl,
                       SimTime now) {
  Entry* e = find(key);
  if (e == nullptr) throw std::logic_error("update of absent FFT entry");
  e->second.port = new_port;
  e->second.gateway = new_gateway;
  e->second.ttl = new_ttl;
  e->second.ts = std::max(e->second.ts, now);
}

void Fft::set_ttl(const FlowKey& key, std::uint8_t ttl, SimTime now) {
  Entry* e = find(key);
  if (e == nullptr) throw std::logic_error("TTL update of absent FFT entry");
  e->second.ttl = ttl;
  e->second.ts = std::max(e->second.ts, now);
}

bool Fft::erase(const FlowKey& key) {
  auto& bucket = buckets_[bucket_of(key)];
  const auto n = std::erase_if(bucket, [&](const Entry& e) { return e.first == key; });
  entry_count_ -= n;
  return n > 0;
}

std::size_t Fft::sweep(SimTime now) {
  std::size_t removed = 0;
  for (auto& bucket : buckets_)
    removed += std::erase_if(bucket, [&](const Entry& e) { return expired(e.second, now); });
  entry_count_ -= removed;
  return removed;
}

std::size_t Fft::live_count(SimTime now) const {
  std::size_t n = 0;
  for (const auto& bucket : buckets_)
    n += std::count_if(bucket.begin(), bucket.end(), [&](const Entry& e) { return !expired(e.second, now); });
  return n;
}

std::string Fft::dump_csv() const {
  std::vector<Entry> all;
  all.reserve(entry_count_);
  for (const auto& bucket : buckets_) all.insert(all.end(), bucket.begin(), bucket.end());
  std::sort(all.begin(), all.end(), [](const Entry& x, const Entry& y) { return x.first < y.first; });
  std::ostringstream out;
  out << "src,dst,sport,dport,proto,ts_us,port,gateway,ttl\n";
  for (const auto& [k, v] : all) {
    out << format_address(k.src_addr) << ',' << format_address(k.dst_addr) << ',' << k.src_port << ','
        << k.dst_port << ',' << unsigned{k.ip_prot} << ',' << v.ts.count() << ',' << unsigned{v.port} << ','
        << format_address(v.gateway) << ',' << unsigned{v.ttl} << '\n';
  }
  return out.str();
}

}  // namespace famtar
