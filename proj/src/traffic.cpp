#include "sentinel/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace sentinel {

std::string_view to_string(GroundTruth g) {
  switch (g) {
    case GroundTruth::Benign: return "benign";
    case GroundTruth::FdiaFalsified: return "fdia-falsified";
    case GroundTruth::DdosFlood: return "ddos-flood";
  }
  return "?";
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
  // FNV-1a over the tag, folded into a splitmix chain.
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : tag) h = (h ^ c) * 0x100000001B3ull;
  std::uint64_t state = seed;
  splitmix64(state);
  state ^= h;
  splitmix64(state);
  state ^= index;
  return splitmix64(state);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::exponential(double rate) { return -std::log1p(-uniform()) / rate; }

std::size_t Rng::categorical(std::span<const double> probabilities) {
  const double u = uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    last = i;
    acc += probabilities[i];
    if (u < acc) return i;
  }
  return last;
}

bool event_order(const LabeledEvent& a, const LabeledEvent& b) {
  const auto& x = a.event;
  const auto& y = b.event;
  if (x.timestamp_ms != y.timestamp_ms) return x.timestamp_ms < y.timestamp_ms;
  if (x.device_id != y.device_id) return x.device_id < y.device_id;
  return x.seq_no < y.seq_no;
}

namespace {

// Poisson arrivals at rate_per_s in [start_ms, end_ms), as integer ms.
template <typename Fn>
void poisson_arrivals(Rng& rng, double rate_per_s, TimeMs start_ms, TimeMs end_ms, Fn&& emit) {
  if (rate_per_s <= 0.0) return;
  const double rate_per_ms = rate_per_s / 1000.0;
  double t = static_cast<double>(start_ms);
  while (true) {
    t += rng.exponential(rate_per_ms);
    const auto ms = static_cast<TimeMs>(std::floor(t));
    if (ms >= end_ms) break;
    emit(ms);
  }
}

DeviceEvent draw_event(Rng& rng, const DeviceProfile& profile, const std::string& gateway_id, std::int64_t seq,
                       TimeMs ts) {
  DeviceEvent e;
  e.device_id = profile.id;
  e.gateway_id = gateway_id;
  e.seq_no = seq;
  e.timestamp_ms = ts;
  e.activity = kActivities[rng.categorical(profile.activity_mix)];
  e.payload_value = rng.uniform(profile.payload_range.min, profile.payload_range.max);
  e.payload_range = profile.payload_range;
  return e;
}

}  // namespace

std::vector<LabeledEvent> gen_traffic(const DeviceProfile& profile, std::uint64_t seed, TimeMs duration_ms,
                                      const std::string& gateway_id) {
  Rng rng(derive_seed(seed, "traffic:" + profile.id));
  std::vector<LabeledEvent> out;
  std::int64_t seq = 0;
  poisson_arrivals(rng, profile.rate_per_s, 0, duration_ms, [&](TimeMs ts) {
    out.push_back({draw_event(rng, profile, gateway_id, seq++, ts), GroundTruth::Benign, -1});
  });
  return out;
}

std::vector<LabeledEvent> inject_ddos(std::vector<LabeledEvent> stream, const AttackSpec& spec,
                                      const std::map<std::string, DeviceProfile>& profiles, std::uint64_t seed,
                                      int attack_index) {
  const std::set<std::string> targets(spec.target_devices.begin(), spec.target_devices.end());
  // Flood seq numbers continue past any flood events already in the stream.
  std::map<std::string, std::int64_t> next_seq;
  std::map<std::string, std::string> gateway_of;
  for (const auto& le : stream) {
    if (!targets.contains(le.event.device_id)) continue;
    gateway_of.try_emplace(le.event.device_id, le.event.gateway_id);
    auto& s = next_seq.try_emplace(le.event.device_id, kFloodSeqBase).first->second;
    if (le.event.seq_no >= kFloodSeqBase) s = std::max(s, le.event.seq_no + 1);
  }

  std::vector<LabeledEvent> flood;
  for (const auto& device : targets) {
    auto pit = profiles.find(device);
    if (pit == profiles.end()) continue;
    const auto& profile = pit->second;
    Rng rng(derive_seed(seed, "ddos:" + device, static_cast<std::uint64_t>(attack_index)));
    auto& seq = next_seq.try_emplace(device, kFloodSeqBase).first->second;
    const auto gw = gateway_of.contains(device) ? gateway_of[device] : std::string{};
    poisson_arrivals(rng, (spec.intensity - 1.0) * profile.rate_per_s, spec.start_ms, spec.end_ms, [&](TimeMs ts) {
      flood.push_back({draw_event(rng, profile, gw, seq++, ts), GroundTruth::DdosFlood, attack_index});
    });
  }
  if (flood.empty()) return stream;
  stream.insert(stream.end(), std::make_move_iterator(flood.begin()), std::make_move_iterator(flood.end()));
  std::stable_sort(stream.begin(), stream.end(), event_order);
  return stream;
}

std::vector<LabeledEvent> inject_fdia(std::vector<LabeledEvent> stream, const AttackSpec& spec, std::uint64_t seed,
                                      int attack_index) {
  const std::set<std::string> targets(spec.target_devices.begin(), spec.target_devices.end());
  std::map<std::string, Rng> rngs;
  for (auto& le : stream) {
    auto& e = le.event;
    if (!targets.contains(e.device_id) || e.timestamp_ms < spec.start_ms || e.timestamp_ms >= spec.end_ms) continue;
    if (le.label != GroundTruth::Benign) continue;
    auto it = rngs.find(e.device_id);
    if (it == rngs.end())
      it = rngs.emplace(e.device_id, Rng(derive_seed(seed, "fdia:" + e.device_id,
                                                     static_cast<std::uint64_t>(attack_index))))
               .first;
    if (!(it->second.uniform() < spec.intensity)) continue;

    const auto& r = e.payload_range;
    if (spec.falsify_mode == FalsifyMode::OutOfRange) {
      e.payload_value = r.max + std::abs(spec.falsify_offset);
    } else {
      e.payload_value = std::clamp(e.payload_value + spec.falsify_offset, r.min, r.max);
    }
    le.label = GroundTruth::FdiaFalsified;
    le.attack_index = attack_index;
  }
  return stream;
}

}  // namespace sentinel
