#include "sentinel/domain.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <set>

namespace sentinel {

std::string_view to_string(ActivityCategory a) {
  switch (a) {
    case ActivityCategory::Read: return "read";
    case ActivityCategory::Update: return "update";
    case ActivityCategory::Delete: return "delete";
  }
  return "?";
}

std::string_view to_string(SecurityState s) {
  switch (s) {
    case SecurityState::Authentic: return "authentic";
    case SecurityState::Suspicious: return "suspicious";
    case SecurityState::Malicious: return "malicious";
  }
  return "?";
}

std::optional<ActivityCategory> parse_activity(std::string_view text) {
  for (auto a : kActivities)
    if (to_string(a) == text) return a;
  return std::nullopt;
}

std::optional<SecurityState> parse_state(std::string_view text) {
  for (auto s : kStates)
    if (to_string(s) == text) return s;
  return std::nullopt;
}

std::string_view to_string(AttackKind k) { return k == AttackKind::FDIA ? "fdia" : "ddos"; }

std::string_view to_string(FalsifyMode m) {
  return m == FalsifyMode::OutOfRange ? "out_of_range" : "in_range_bias";
}

std::string_view to_string(ConfigErrc code) {
  switch (code) {
    case ConfigErrc::ParseError: return "ParseError";
    case ConfigErrc::DurationNotPositive: return "DurationNotPositive";
    case ConfigErrc::NegativeThreshold: return "NegativeThreshold";
    case ConfigErrc::ThresholdOrder: return "ThresholdOrder";
    case ConfigErrc::WindowNotPositive: return "WindowNotPositive";
    case ConfigErrc::HoldingTimeNotPositive: return "HoldingTimeNotPositive";
    case ConfigErrc::EmptyId: return "EmptyId";
    case ConfigErrc::DuplicateDevice: return "DuplicateDevice";
    case ConfigErrc::InvalidPayloadRange: return "InvalidPayloadRange";
    case ConfigErrc::RateNotPositive: return "RateNotPositive";
    case ConfigErrc::MixOutOfRange: return "MixOutOfRange";
    case ConfigErrc::MixNotNormalized: return "MixNotNormalized";
    case ConfigErrc::DuplicateGateway: return "DuplicateGateway";
    case ConfigErrc::UnknownDevice: return "UnknownDevice";
    case ConfigErrc::UnassignedDevice: return "UnassignedDevice";
    case ConfigErrc::MultiplyAssignedDevice: return "MultiplyAssignedDevice";
    case ConfigErrc::AttackInterval: return "AttackInterval";
    case ConfigErrc::UnknownAttackTarget: return "UnknownAttackTarget";
    case ConfigErrc::AttackIntensity: return "AttackIntensity";
    case ConfigErrc::FalsifyOffset: return "FalsifyOffset";
    case ConfigErrc::SmoothingNegative: return "SmoothingNegative";
    case ConfigErrc::TickNotPositive: return "TickNotPositive";
    case ConfigErrc::AlertOutOfRange: return "AlertOutOfRange";
    case ConfigErrc::NegativeDelay: return "NegativeDelay";
    case ConfigErrc::InvalidSealKey: return "InvalidSealKey";
  }
  return "?";
}

ConfigError::ConfigError(ConfigErrc code, std::string path, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + " at " + path +
                         (detail.empty() ? "" : ": " + detail)),
      code_(code),
      path_(std::move(path)) {}

std::optional<ConfigErrc> check_thresholds(const Thresholds& t) {
  if (t.theta_s < 0 || t.theta_m < 0) return ConfigErrc::NegativeThreshold;
  if (!(t.theta_s < t.theta_m)) return ConfigErrc::ThresholdOrder;
  if (t.window_ms <= 0) return ConfigErrc::WindowNotPositive;
  return std::nullopt;
}

std::optional<ConfigErrc> check_holding_times(const HoldingTimeTable& h) {
  for (auto s : kStates)
    for (auto a : kActivities)
      if (h.at(s, a) <= 0) return ConfigErrc::HoldingTimeNotPositive;
  return std::nullopt;
}

namespace {

std::string idx(std::string_view base, std::size_t i) {
  return std::string(base) + "/" + std::to_string(i);
}

bool is_hex_key(const std::string& s) {
  if (s.size() != 64) return false;
  for (char c : s)
    if (!std::isxdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

ScenarioConfig validate_config(const ScenarioConfig& config) {
  using E = ConfigErrc;
  if (config.duration_ms <= 0) throw ConfigError(E::DurationNotPositive, "/duration_ms");

  if (auto err = check_thresholds(config.thresholds)) {
    const char* field = *err == E::WindowNotPositive ? "/thresholds/window_ms" : "/thresholds/theta_s";
    throw ConfigError(*err, field);
  }
  for (auto s : kStates)
    for (auto a : kActivities)
      if (config.holding_times.at(s, a) <= 0)
        throw ConfigError(E::HoldingTimeNotPositive, "/holding_times/" + std::string(to_string(s)) +
                                                         "/" + std::string(to_string(a)));

  std::set<std::string> device_ids;
  for (std::size_t i = 0; i < config.devices.size(); ++i) {
    const auto& d = config.devices[i];
    const auto path = idx("/devices", i);
    if (d.id.empty()) throw ConfigError(E::EmptyId, path + "/id");
    if (!device_ids.insert(d.id).second) throw ConfigError(E::DuplicateDevice, path + "/id", d.id);
    if (!std::isfinite(d.payload_range.min) || !std::isfinite(d.payload_range.max) ||
        d.payload_range.min > d.payload_range.max)
      throw ConfigError(E::InvalidPayloadRange, path + "/payload_range");
    if (!(d.rate_per_s > 0.0) || !std::isfinite(d.rate_per_s))
      throw ConfigError(E::RateNotPositive, path + "/rate_per_s");
    double sum = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      const double p = d.activity_mix[k];
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(E::MixOutOfRange, idx(path + "/activity_mix", k));
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ConfigError(E::MixNotNormalized, path + "/activity_mix", "sums to " + std::to_string(sum));
  }

  std::set<std::string> gateway_ids;
  std::map<std::string, std::size_t> assigned;
  for (std::size_t g = 0; g < config.gateways.size(); ++g) {
    const auto& gw = config.gateways[g];
    const auto path = idx("/gateways", g);
    if (gw.id.empty()) throw ConfigError(E::EmptyId, path + "/id");
    if (!gateway_ids.insert(gw.id).second) throw ConfigError(E::DuplicateGateway, path + "/id", gw.id);
    for (std::size_t k = 0; k < gw.devices.size(); ++k) {
      const auto& dev = gw.devices[k];
      if (!device_ids.contains(dev)) throw ConfigError(E::UnknownDevice, idx(path + "/devices", k), dev);
      if (!assigned.emplace(dev, g).second)
        throw ConfigError(E::MultiplyAssignedDevice, idx(path + "/devices", k), dev);
    }
  }
  for (std::size_t i = 0; i < config.devices.size(); ++i)
    if (!assigned.contains(config.devices[i].id))
      throw ConfigError(E::UnassignedDevice, idx("/devices", i), config.devices[i].id);

  for (std::size_t i = 0; i < config.attacks.size(); ++i) {
    const auto& a = config.attacks[i];
    const auto path = idx("/attacks", i);
    if (!(0 <= a.start_ms && a.start_ms < a.end_ms && a.end_ms <= config.duration_ms))
      throw ConfigError(E::AttackInterval, path);
    for (std::size_t k = 0; k < a.target_devices.size(); ++k)
      if (!device_ids.contains(a.target_devices[k]))
        throw ConfigError(E::UnknownAttackTarget, idx(path + "/target_devices", k), a.target_devices[k]);
    if (a.kind == AttackKind::DDoS) {
      if (!(a.intensity >= 1.0) || !std::isfinite(a.intensity))
        throw ConfigError(E::AttackIntensity, path + "/intensity", "DDoS multiplier must be >= 1");
    } else {
      if (!(a.intensity >= 0.0 && a.intensity <= 1.0))
        throw ConfigError(E::AttackIntensity, path + "/intensity", "FDIA probability must be in [0,1]");
      if (!std::isfinite(a.falsify_offset) ||
          (a.falsify_mode == FalsifyMode::OutOfRange && a.falsify_offset == 0.0))
        throw ConfigError(E::FalsifyOffset, path + "/falsify_offset");
    }
  }

  if (!(config.detector.smoothing_alpha >= 0.0) || !std::isfinite(config.detector.smoothing_alpha))
    throw ConfigError(E::SmoothingNegative, "/detector/smoothing_alpha");
  if (config.detector.tick_ms <= 0) throw ConfigError(E::TickNotPositive, "/detector/tick_ms");
  if (!(config.detector.p_alert >= 0.0 && config.detector.p_alert <= 1.0))
    throw ConfigError(E::AlertOutOfRange, "/detector/p_alert");
  if (config.hop_delay_ms < 0) throw ConfigError(E::NegativeDelay, "/hop_delay_ms");
  if (config.unblock_delay_ms && *config.unblock_delay_ms < 0)
    throw ConfigError(E::NegativeDelay, "/unblock_delay_ms");
  if (config.seal_key_hex && !is_hex_key(*config.seal_key_hex))
    throw ConfigError(E::InvalidSealKey, "/seal_key_hex", "expected 64 hex characters");

  return config;
}

}  // namespace sentinel
