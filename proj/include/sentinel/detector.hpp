#pragma once

// Per-device prediction and detection: sliding-window log counting, dual
// threshold classification, and a jump-chain Markov model over the state
// history used to predict the next state.

#include <array>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sentinel/collector.hpp"
#include "sentinel/domain.hpp"

namespace sentinel {

using StateDistribution = std::array<double, 3>;

/// Thrown by transition_probabilities() when alpha == 0 and the row is empty.
class EmptyRowError : public std::domain_error {
 public:
  explicit EmptyRowError(SecurityState from);
};

/// Thrown when a record is routed to the wrong tracker.
class DeviceMismatchError : public std::invalid_argument {
 public:
  DeviceMismatchError(const std::string& expected, const std::string& got);
};

struct WindowEntry {
  TimeMs timestamp_ms;
  ActivityCategory activity;
  bool operator==(const WindowEntry&) const = default;
};

/// Time-ordered activity log of one device, trimmed to the last window_ms.
struct ActivityWindow {
  std::deque<WindowEntry> events;
  bool operator==(const ActivityWindow&) const = default;
};

struct MarkovChainModel {
  std::array<std::array<std::uint64_t, 3>, 3> transition_counts{};
  double smoothing_alpha = 1.0;

  std::uint64_t row_sum(SecurityState from) const;
  std::uint64_t total() const;
  bool operator==(const MarkovChainModel&) const = default;
};

struct DeviceTracker {
  std::string device_id;
  ActivityWindow window;
  SecurityState current_state = SecurityState::Authentic;
  TimeMs state_entered_at_ms = 0;
  MarkovChainModel chain;
  std::int64_t last_seq_no = -1;

  bool operator==(const DeviceTracker&) const = default;
};

enum class VerdictSource : std::uint8_t { Event, Tick };

struct Verdict {
  std::string device_id;
  TimeMs timestamp_ms = 0;
  SecurityState state = SecurityState::Authentic;
  std::int64_t count = 0;
  StateDistribution predicted_next{};
  /// P(Malicious) in predicted_next exceeds p_alert.
  bool alert = false;
  VerdictSource source = VerdictSource::Event;

  bool operator==(const Verdict&) const = default;
};

/// Counts retained events with timestamp in (now - window_ms, now], evicting
/// anything older.
std::int64_t window_count(DeviceTracker& tracker, TimeMs now_ms, TimeMs window_ms);

/// count <= theta_s -> Authentic; theta_s < count <= theta_m -> Suspicious;
/// count > theta_m -> Malicious.
SecurityState assess_state(std::int64_t count, const Thresholds& thresholds);

void observe_transition(MarkovChainModel& chain, SecurityState from, SecurityState to);

/// Additively smoothed row: (counts[from][to] + alpha) / (row_sum + 3 alpha).
StateDistribution transition_probabilities(const MarkovChainModel& chain, SecurityState from);

/// Appends the record, re-counts, re-assesses, records a transition on state
/// change and predicts the next state.
Verdict step(DeviceTracker& tracker, const CleanRecord& record, const Thresholds& thresholds,
             TimeMs now_ms, double p_alert = 0.5);

/// Timer-driven re-assessment so quiet devices decay as their window drains.
/// Returns a verdict only when the state changed.
std::optional<Verdict> reassess(DeviceTracker& tracker, const Thresholds& thresholds, TimeMs now_ms,
                                double p_alert = 0.5);

/// All trackers owned by one gateway.
class Detector {
 public:
  explicit Detector(double smoothing_alpha = 1.0, double p_alert = 0.5)
      : smoothing_alpha_(smoothing_alpha), p_alert_(p_alert) {}
  /// Restores a snapshotted detector.
  Detector(double smoothing_alpha, double p_alert, std::map<std::string, DeviceTracker> trackers)
      : smoothing_alpha_(smoothing_alpha), p_alert_(p_alert), trackers_(std::move(trackers)) {}

  Verdict on_record(const CleanRecord& record, const Thresholds& thresholds, TimeMs now_ms);
  std::vector<Verdict> on_tick(const Thresholds& thresholds, TimeMs now_ms);

  const std::map<std::string, DeviceTracker>& trackers() const { return trackers_; }
  const DeviceTracker* find(const std::string& device_id) const;
  double smoothing_alpha() const { return smoothing_alpha_; }
  double p_alert() const { return p_alert_; }

  bool operator==(const Detector&) const = default;

 private:
  double smoothing_alpha_;
  double p_alert_;
  std::map<std::string, DeviceTracker> trackers_;
};

}  // namespace sentinel
