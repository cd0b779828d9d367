#include "sentinel/collector.hpp"

#include <cmath>
#include <unordered_set>

namespace sentinel {

std::string_view to_string(CleansingFlag f) {
  switch (f) {
    case CleansingFlag::TimestampNormalized: return "TimestampNormalized";
  }
  return "?";
}

std::string_view to_string(RejectReason r) {
  return r == RejectReason::OutOfRange ? "OutOfRange" : "MalformedEvent";
}

std::string_view to_string(CollectorDecision d) {
  switch (d) {
    case CollectorDecision::Accept: return "accept";
    case CollectorDecision::Reject: return "reject";
    case CollectorDecision::DedupDrop: return "dedup_drop";
    case CollectorDecision::BlockedDrop: return "blocked_drop";
  }
  return "?";
}

std::optional<RejectReason> check_event(const DeviceEvent& event) {
  const auto& r = event.payload_range;
  if (event.device_id.empty() || event.timestamp_ms < 0 || event.seq_no < 0 ||
      !std::isfinite(r.min) || !std::isfinite(r.max) || r.min > r.max ||
      std::isnan(event.payload_value))
    return RejectReason::MalformedEvent;
  if (!r.contains(event.payload_value)) return RejectReason::OutOfRange;
  return std::nullopt;
}

std::vector<CleanRecord> dedupe(std::span<const CleanRecord> batch) {
  struct KeyHash {
    std::size_t operator()(const std::pair<std::string_view, std::int64_t>& k) const {
      return std::hash<std::string_view>{}(k.first) * 31 + std::hash<std::int64_t>{}(k.second);
    }
  };
  std::unordered_set<std::pair<std::string_view, std::int64_t>, KeyHash> seen;
  std::vector<CleanRecord> out;
  out.reserve(batch.size());
  for (const auto& rec : batch)
    if (seen.emplace(rec.event.device_id, rec.event.seq_no).second) out.push_back(rec);
  return out;
}

Collector::Collector(std::string gateway_id, std::set<std::string> assigned_devices,
                     TimeMs dedup_window_ms)
    : gateway_id_(std::move(gateway_id)),
      assigned_(std::move(assigned_devices)),
      dedup_window_ms_(dedup_window_ms) {}

const IntakeEntry& Collector::ingest(DeviceEvent event) {
  const bool foreign = !assigned_.contains(event.device_id);
  queue_.push_back(IntakeEntry{std::move(event), foreign});
  return queue_.back();
}

CleanseResult Collector::cleanse(const DeviceEvent& event) {
  if (auto reason = check_event(event)) return Reject{*reason};

  CleanRecord rec{event, {}};
  auto [it, inserted] = last_timestamp_.try_emplace(event.device_id, event.timestamp_ms);
  if (!inserted) {
    if (rec.event.timestamp_ms < it->second) {
      rec.event.timestamp_ms = it->second;
      rec.cleansing_flags.insert(CleansingFlag::TimestampNormalized);
    }
    it->second = rec.event.timestamp_ms;
  }
  return rec;
}

void Collector::evict_clone_keys(TimeMs now_ms) {
  const TimeMs horizon = now_ms - dedup_window_ms_;
  while (!clone_expiry_.empty() && clone_expiry_.begin()->first <= horizon) {
    auto node = clone_expiry_.begin();
    auto key_it = clone_keys_.find(node->second);
    if (key_it != clone_keys_.end() && key_it->second == node->first) clone_keys_.erase(key_it);
    clone_expiry_.erase(node);
  }
}

bool Collector::admit(const CleanRecord& record, TimeMs now_ms) {
  evict_clone_keys(now_ms);
  CloneKey key{record.event.device_id, record.event.seq_no};
  auto [it, inserted] = clone_keys_.try_emplace(key, record.event.timestamp_ms);
  if (!inserted) return false;
  clone_expiry_.emplace(record.event.timestamp_ms, std::move(key));
  return true;
}

std::vector<CollectorOutcome> Collector::drain(TimeMs now_ms) {
  std::vector<CollectorOutcome> out;
  out.reserve(queue_.size());
  while (!queue_.empty()) {
    IntakeEntry entry = std::move(queue_.front());
    queue_.pop_front();

    CollectorOutcome outcome{CollectorDecision::Accept, std::move(entry), std::nullopt, std::nullopt};
    const auto& ev = outcome.intake.event;
    if (is_blocked(ev.device_id, now_ms)) {
      outcome.decision = CollectorDecision::BlockedDrop;
    } else if (auto cleaned = cleanse(ev); std::holds_alternative<Reject>(cleaned)) {
      outcome.decision = CollectorDecision::Reject;
      outcome.reject_reason = std::get<Reject>(cleaned).reason;
    } else {
      auto& rec = std::get<CleanRecord>(cleaned);
      if (admit(rec, now_ms)) {
        last_emitted_.insert_or_assign(rec.event.device_id, rec);
      } else {
        outcome.decision = CollectorDecision::DedupDrop;
      }
      outcome.record = std::move(rec);
    }
    out.push_back(std::move(outcome));
  }
  return out;
}

void Collector::block(const std::string& device_id, TimeMs now_ms,
                      std::optional<TimeMs> unblock_delay_ms) {
  std::optional<TimeMs> until;
  if (unblock_delay_ms) until = now_ms + *unblock_delay_ms;
  blocklist_.insert_or_assign(device_id, until);
}

bool Collector::is_blocked(const std::string& device_id, TimeMs now_ms) const {
  auto it = blocklist_.find(device_id);
  if (it == blocklist_.end()) return false;
  return !it->second || now_ms < *it->second;
}

std::optional<CleanRecord> Collector::last_record(const std::string& device_id) const {
  auto it = last_emitted_.find(device_id);
  if (it == last_emitted_.end()) return std::nullopt;
  return it->second;
}

}  // namespace sentinel
