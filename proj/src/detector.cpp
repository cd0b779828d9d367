#include "sentinel/detector.hpp"

#include <algorithm>
#include <numeric>

namespace sentinel {

EmptyRowError::EmptyRowError(SecurityState from)
    : std::domain_error("EmptyRow: no observed transitions from " + std::string(to_string(from)) +
                        " and smoothing_alpha == 0") {}

DeviceMismatchError::DeviceMismatchError(const std::string& expected, const std::string& got)
    : std::invalid_argument("DeviceMismatch: expected " + expected + ", got " + got) {}

std::uint64_t MarkovChainModel::row_sum(SecurityState from) const {
  const auto& row = transition_counts[index_of(from)];
  return std::accumulate(row.begin(), row.end(), std::uint64_t{0});
}

std::uint64_t MarkovChainModel::total() const {
  std::uint64_t sum = 0;
  for (auto s : kStates) sum += row_sum(s);
  return sum;
}

std::int64_t window_count(DeviceTracker& tracker, TimeMs now_ms, TimeMs window_ms) {
  auto& events = tracker.window.events;
  const TimeMs horizon = now_ms - window_ms;
  while (!events.empty() && events.front().timestamp_ms <= horizon) events.pop_front();
  // Entries stamped after now (never produced by the pipeline) are not counted.
  std::int64_t n = 0;
  for (auto it = events.rbegin(); it != events.rend() && it->timestamp_ms > now_ms; ++it) ++n;
  return static_cast<std::int64_t>(events.size()) - n;
}

SecurityState assess_state(std::int64_t count, const Thresholds& thresholds) {
  if (count > thresholds.theta_m) return SecurityState::Malicious;
  if (count > thresholds.theta_s) return SecurityState::Suspicious;
  return SecurityState::Authentic;
}

void observe_transition(MarkovChainModel& chain, SecurityState from, SecurityState to) {
  ++chain.transition_counts[index_of(from)][index_of(to)];
}

StateDistribution transition_probabilities(const MarkovChainModel& chain, SecurityState from) {
  const double alpha = chain.smoothing_alpha;
  const auto& row = chain.transition_counts[index_of(from)];
  const double denom = static_cast<double>(chain.row_sum(from)) + 3.0 * alpha;
  if (denom <= 0.0) throw EmptyRowError(from);
  StateDistribution p{};
  for (std::size_t k = 0; k < 3; ++k) p[k] = (static_cast<double>(row[k]) + alpha) / denom;
  return p;
}

namespace {

// With alpha == 0 an unvisited row has no estimate; predict staying put.
StateDistribution predict_from(const MarkovChainModel& chain, SecurityState from) {
  if (chain.smoothing_alpha == 0.0 && chain.row_sum(from) == 0) {
    StateDistribution p{};
    p[index_of(from)] = 1.0;
    return p;
  }
  return transition_probabilities(chain, from);
}

Verdict make_verdict(DeviceTracker& tracker, std::int64_t count, SecurityState next, TimeMs now_ms,
                     double p_alert, VerdictSource source) {
  if (next != tracker.current_state) {
    observe_transition(tracker.chain, tracker.current_state, next);
    tracker.current_state = next;
    tracker.state_entered_at_ms = now_ms;
  }
  Verdict v;
  v.device_id = tracker.device_id;
  v.timestamp_ms = now_ms;
  v.state = next;
  v.count = count;
  v.predicted_next = predict_from(tracker.chain, next);
  v.alert = v.predicted_next[index_of(SecurityState::Malicious)] > p_alert;
  v.source = source;
  return v;
}

}  // namespace

Verdict step(DeviceTracker& tracker, const CleanRecord& record, const Thresholds& thresholds,
             TimeMs now_ms, double p_alert) {
  if (record.event.device_id != tracker.device_id)
    throw DeviceMismatchError(tracker.device_id, record.event.device_id);

  tracker.window.events.push_back({record.event.timestamp_ms, record.event.activity});
  tracker.last_seq_no = std::max(tracker.last_seq_no, record.event.seq_no);
  const auto count = window_count(tracker, now_ms, thresholds.window_ms);
  return make_verdict(tracker, count, assess_state(count, thresholds), now_ms, p_alert,
                      VerdictSource::Event);
}

std::optional<Verdict> reassess(DeviceTracker& tracker, const Thresholds& thresholds, TimeMs now_ms,
                                double p_alert) {
  const auto count = window_count(tracker, now_ms, thresholds.window_ms);
  const auto next = assess_state(count, thresholds);
  if (next == tracker.current_state) return std::nullopt;
  return make_verdict(tracker, count, next, now_ms, p_alert, VerdictSource::Tick);
}

Verdict Detector::on_record(const CleanRecord& record, const Thresholds& thresholds, TimeMs now_ms) {
  auto it = trackers_.find(record.event.device_id);
  if (it == trackers_.end()) {
    DeviceTracker fresh;
    fresh.device_id = record.event.device_id;
    fresh.state_entered_at_ms = now_ms;
    fresh.chain.smoothing_alpha = smoothing_alpha_;
    it = trackers_.emplace(record.event.device_id, std::move(fresh)).first;
  }
  return step(it->second, record, thresholds, now_ms, p_alert_);
}

std::vector<Verdict> Detector::on_tick(const Thresholds& thresholds, TimeMs now_ms) {
  std::vector<Verdict> out;
  for (auto& [id, tracker] : trackers_)
    if (auto v = reassess(tracker, thresholds, now_ms, p_alert_)) out.push_back(std::move(*v));
  return out;
}

const DeviceTracker* Detector::find(const std::string& device_id) const {
  auto it = trackers_.find(device_id);
  return it == trackers_.end() ? nullptr : &it->second;
}

}  // namespace sentinel
