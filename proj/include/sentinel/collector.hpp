#pragma once

// Gateway-side ingestion: non-selective intake, cleansing, clone removal and
// the per-gateway blocklist enforced before anything reaches the detector.

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sentinel/domain.hpp"

namespace sentinel {

enum class CleansingFlag : std::uint8_t { TimestampNormalized };

std::string_view to_string(CleansingFlag f);

/// A DeviceEvent that passed cleansing. payload_value is within payload_range
/// and timestamps are non-decreasing per device within one collector's output.
struct CleanRecord {
  DeviceEvent event;
  std::set<CleansingFlag> cleansing_flags;

  bool has_flag(CleansingFlag f) const { return cleansing_flags.contains(f); }
  bool operator==(const CleanRecord&) const = default;
};

enum class RejectReason : std::uint8_t { OutOfRange, MalformedEvent };

std::string_view to_string(RejectReason r);

struct Reject {
  RejectReason reason;
  bool operator==(const Reject&) const = default;
};

using CleanseResult = std::variant<CleanRecord, Reject>;

/// Stateless well-formedness and range check, shared by cleanse() and by
/// VerifyData re-confirmation.
std::optional<RejectReason> check_event(const DeviceEvent& event);

/// First occurrence of each (device_id, seq_no) survives; survivor order is
/// preserved.
std::vector<CleanRecord> dedupe(std::span<const CleanRecord> batch);

struct IntakeEntry {
  DeviceEvent event;
  /// Device is not assigned to the receiving gateway. Still queued.
  bool out_of_range_source = false;
};

enum class CollectorDecision : std::uint8_t { Accept, Reject, DedupDrop, BlockedDrop };

std::string_view to_string(CollectorDecision d);

struct CollectorOutcome {
  CollectorDecision decision;
  IntakeEntry intake;
  std::optional<CleanRecord> record;  // Accept and DedupDrop
  std::optional<RejectReason> reject_reason;
};

class Collector {
 public:
  Collector(std::string gateway_id, std::set<std::string> assigned_devices, TimeMs dedup_window_ms);

  const std::string& gateway_id() const { return gateway_id_; }

  /// Non-selective intake: nothing is refused here.
  const IntakeEntry& ingest(DeviceEvent event);
  std::size_t pending() const { return queue_.size(); }

  /// Range/format check plus per-device timestamp clamping. Never alters the
  /// payload value.
  CleanseResult cleanse(const DeviceEvent& event);

  /// Windowed clone filter keyed by (device_id, seq_no). Returns false for a
  /// clone. Keys older than the dedup window are forgotten.
  bool admit(const CleanRecord& record, TimeMs now_ms);

  /// Processes the intake queue in FIFO order.
  std::vector<CollectorOutcome> drain(TimeMs now_ms);

  void block(const std::string& device_id, TimeMs now_ms, std::optional<TimeMs> unblock_delay_ms);
  bool is_blocked(const std::string& device_id, TimeMs now_ms) const;
  /// device -> unblock time (nullopt = permanent).
  const std::map<std::string, std::optional<TimeMs>>& blocklist() const { return blocklist_; }

  void set_dedup_window(TimeMs window_ms) { dedup_window_ms_ = window_ms; }

  /// Last record emitted downstream for the device.
  std::optional<CleanRecord> last_record(const std::string& device_id) const;

 private:
  using CloneKey = std::pair<std::string, std::int64_t>;

  void evict_clone_keys(TimeMs now_ms);

  std::string gateway_id_;
  std::set<std::string> assigned_;
  TimeMs dedup_window_ms_;
  std::deque<IntakeEntry> queue_;
  std::map<std::string, TimeMs> last_timestamp_;
  std::map<CloneKey, TimeMs> clone_keys_;
  std::multimap<TimeMs, CloneKey> clone_expiry_;
  std::map<std::string, std::optional<TimeMs>> blocklist_;
  std::map<std::string, CleanRecord> last_emitted_;
};

}  // namespace sentinel
