#pragma once

// Shared vocabulary for the collector / detector / reactor pipeline and the
// scenario simulator. Everything here is a plain value type.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sentinel {

/// Simulation time in integer milliseconds since scenario start.
using TimeMs = std::int64_t;

enum class ActivityCategory : std::uint8_t { Read = 0, Update = 1, Delete = 2 };

/// Severity-ordered: Authentic < Suspicious < Malicious.
enum class SecurityState : std::uint8_t { Authentic = 0, Suspicious = 1, Malicious = 2 };

inline constexpr std::array<ActivityCategory, 3> kActivities{
    ActivityCategory::Read, ActivityCategory::Update, ActivityCategory::Delete};
inline constexpr std::array<SecurityState, 3> kStates{
    SecurityState::Authentic, SecurityState::Suspicious, SecurityState::Malicious};

constexpr std::size_t index_of(ActivityCategory a) { return static_cast<std::size_t>(a); }
constexpr std::size_t index_of(SecurityState s) { return static_cast<std::size_t>(s); }

std::string_view to_string(ActivityCategory a);
std::string_view to_string(SecurityState s);
std::optional<ActivityCategory> parse_activity(std::string_view text);
std::optional<SecurityState> parse_state(std::string_view text);

struct PayloadRange {
  double min = 0.0;
  double max = 0.0;

  bool contains(double v) const { return v >= min && v <= max; }
  bool operator==(const PayloadRange&) const = default;
};

/// One logged action from a device.
struct DeviceEvent {
  std::string device_id;
  std::string gateway_id;
  std::int64_t seq_no = 0;
  TimeMs timestamp_ms = 0;
  ActivityCategory activity = ActivityCategory::Read;
  double payload_value = 0.0;
  PayloadRange payload_range;

  bool operator==(const DeviceEvent&) const = default;
};

/// Dual log-count thresholds over a sliding window. Comparisons are strict:
/// count <= theta_s is Authentic, count > theta_m is Malicious.
struct Thresholds {
  std::int64_t theta_s = 10;
  std::int64_t theta_m = 20;
  TimeMs window_ms = 10'000;

  bool operator==(const Thresholds&) const = default;
};

/// Total map (SecurityState, ActivityCategory) -> holding time in ms.
class HoldingTimeTable {
 public:
  HoldingTimeTable() : HoldingTimeTable(3'000) {}
  explicit HoldingTimeTable(TimeMs uniform_ms) {
    for (auto& row : ms_) row.fill(uniform_ms);
  }

  TimeMs at(SecurityState s, ActivityCategory a) const { return ms_[index_of(s)][index_of(a)]; }
  void set(SecurityState s, ActivityCategory a, TimeMs ms) { ms_[index_of(s)][index_of(a)] = ms; }

  bool operator==(const HoldingTimeTable&) const = default;

 private:
  std::array<std::array<TimeMs, 3>, 3> ms_{};
};

struct DeviceProfile {
  std::string id;
  PayloadRange payload_range{0.0, 100.0};
  double rate_per_s = 1.0;
  /// Probability triple over Read / Update / Delete.
  std::array<double, 3> activity_mix{1.0, 0.0, 0.0};

  bool operator==(const DeviceProfile&) const = default;
};

struct GatewaySpec {
  std::string id;
  std::vector<std::string> devices;

  bool operator==(const GatewaySpec&) const = default;
};

enum class AttackKind : std::uint8_t { FDIA, DDoS };
enum class FalsifyMode : std::uint8_t { OutOfRange, InRangeBias };

std::string_view to_string(AttackKind k);
std::string_view to_string(FalsifyMode m);

struct AttackSpec {
  AttackKind kind = AttackKind::DDoS;
  std::vector<std::string> target_devices;
  TimeMs start_ms = 0;
  TimeMs end_ms = 0;
  /// DDoS: rate multiplier (>= 1). FDIA: per-event falsification probability.
  double intensity = 1.0;
  FalsifyMode falsify_mode = FalsifyMode::OutOfRange;
  /// FDIA only. OutOfRange pushes the value to max + |offset|; InRangeBias adds
  /// the offset and clamps into the range.
  double falsify_offset = 10.0;

  bool operator==(const AttackSpec&) const = default;
};

/// Detector knobs that are not part of the threshold pair.
struct DetectorSettings {
  double smoothing_alpha = 1.0;
  TimeMs tick_ms = 1'000;
  double p_alert = 0.5;

  bool operator==(const DetectorSettings&) const = default;
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  TimeMs duration_ms = 60'000;
  std::vector<DeviceProfile> devices;
  std::vector<GatewaySpec> gateways;
  Thresholds thresholds;
  HoldingTimeTable holding_times;
  std::vector<AttackSpec> attacks;
  DetectorSettings detector;
  /// Per-hop access -> MEC delay.
  TimeMs hop_delay_ms = 0;
  /// Unset: a blocked device stays blocked for the rest of the run.
  std::optional<TimeMs> unblock_delay_ms;
  /// 64 hex chars; unset derives the scenario key from the seed.
  std::optional<std::string> seal_key_hex;

  bool operator==(const ScenarioConfig&) const = default;
};

enum class ConfigErrc {
  ParseError,
  DurationNotPositive,
  NegativeThreshold,
  ThresholdOrder,
  WindowNotPositive,
  HoldingTimeNotPositive,
  EmptyId,
  DuplicateDevice,
  InvalidPayloadRange,
  RateNotPositive,
  MixOutOfRange,
  MixNotNormalized,
  DuplicateGateway,
  UnknownDevice,
  UnassignedDevice,
  MultiplyAssignedDevice,
  AttackInterval,
  UnknownAttackTarget,
  AttackIntensity,
  FalsifyOffset,
  SmoothingNegative,
  TickNotPositive,
  AlertOutOfRange,
  NegativeDelay,
  InvalidSealKey,
};

std::string_view to_string(ConfigErrc code);

/// First violated invariant, with a JSON-pointer-like path to the field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(ConfigErrc code, std::string path, const std::string& detail = {});

  ConfigErrc code() const { return code_; }
  const std::string& path() const { return path_; }

 private:
  ConfigErrc code_;
  std::string path_;
};

/// Throws ConfigError on the first violated invariant; otherwise returns the
/// config unchanged.
ScenarioConfig validate_config(const ScenarioConfig& config);

/// Thresholds invariant only (used when applying runtime updates).
std::optional<ConfigErrc> check_thresholds(const Thresholds& t);
std::optional<ConfigErrc> check_holding_times(const HoldingTimeTable& h);

}  // namespace sentinel
