#pragma once

// Labeled event generation: Poisson device traffic plus DDoS and FDIA
// injectors. Every stream is a pure function of its inputs and seed.

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sentinel/domain.hpp"

namespace sentinel {

/// Evaluation-only ground truth. Never handed to collector/detector/reactor.
enum class GroundTruth : std::uint8_t { Benign, FdiaFalsified, DdosFlood };

std::string_view to_string(GroundTruth g);

struct LabeledEvent {
  DeviceEvent event;
  GroundTruth label = GroundTruth::Benign;
  /// Index into ScenarioConfig::attacks for attack-labeled events, else -1.
  int attack_index = -1;

  bool operator==(const LabeledEvent&) const = default;
};

/// Flood events take sequence numbers from this base upward so they never
/// collide with a device's honest sequence.
inline constexpr std::int64_t kFloodSeqBase = std::int64_t{1} << 40;

/// splitmix64-based seed derivation for independent sub-streams.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0);

/// Thin wrapper over mt19937_64 with platform-independent transforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Exponential with the given rate (events per unit).
  double exponential(double rate);
  /// Index drawn from a probability vector.
  std::size_t categorical(std::span<const double> probabilities);

 private:
  std::mt19937_64 engine_;
};

/// Orders by (timestamp, device_id, seq_no).
bool event_order(const LabeledEvent& a, const LabeledEvent& b);

/// Poisson arrivals at profile.rate_per_s over [0, duration_ms); activity from
/// the profile mix; payload uniform within the payload range.
std::vector<LabeledEvent> gen_traffic(const DeviceProfile& profile, std::uint64_t seed, TimeMs duration_ms,
                                      const std::string& gateway_id = {});

/// Adds ddos-flood events so that each target's rate within [start, end) is
/// multiplied by spec.intensity. Existing events are untouched.
std::vector<LabeledEvent> inject_ddos(std::vector<LabeledEvent> stream, const AttackSpec& spec,
                                      const std::map<std::string, DeviceProfile>& profiles, std::uint64_t seed,
                                      int attack_index = 0);

/// Falsifies each benign in-interval target event with probability
/// spec.intensity.
std::vector<LabeledEvent> inject_fdia(std::vector<LabeledEvent> stream, const AttackSpec& spec,
                                      std::uint64_t seed, int attack_index = 0);

}  // namespace sentinel
