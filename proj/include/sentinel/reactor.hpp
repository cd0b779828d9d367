#pragma once

// Reaction flowchart executed on every (record, verdict) pair, the
// observation ledger it maintains, and the MEC control server that applies
// control messages to the live security parameters.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "sentinel/collector.hpp"
#include "sentinel/detector.hpp"
#include "sentinel/domain.hpp"

namespace sentinel {

enum class ControlKind : std::uint8_t { VerifyData, UpdateSecuritySettings };
enum class MaliciousCause : std::uint8_t { DetectorVerdict, HoldingTimeExceeded };

std::string_view to_string(ControlKind k);
std::string_view to_string(MaliciousCause c);

struct BlockAndRevoke {
  std::string device_id;
  bool operator==(const BlockAndRevoke&) const = default;
};

struct SealAndStore {
  CleanRecord record;
  bool operator==(const SealAndStore&) const = default;
};

struct Observe {
  std::string device_id;
  TimeMs started_at_ms = 0;
  bool operator==(const Observe&) const = default;
};

/// Harmful path: block access and monitor the device.
struct ReportMalicious {
  std::string device_id;
  MaliciousCause cause = MaliciousCause::DetectorVerdict;
  bool operator==(const ReportMalicious&) const = default;
};

struct ControlMessage {
  std::string device_id;
  ControlKind kind = ControlKind::VerifyData;
  /// UpdateSecuritySettings payload; unset fields leave the live value alone.
  std::optional<Thresholds> thresholds;
  std::optional<HoldingTimeTable> holding_times;
  bool operator==(const ControlMessage&) const = default;
};

using ReactionOutcome = std::variant<BlockAndRevoke, SealAndStore, Observe, ReportMalicious, ControlMessage>;

std::string_view outcome_name(const ReactionOutcome& outcome);
/// BlockAndRevoke or ReportMalicious.
bool is_harmful(const ReactionOutcome& outcome);
const std::string& outcome_device(const ReactionOutcome& outcome);

struct ObservationEntry {
  TimeMs entered_at_ms = 0;
  SecurityState state = SecurityState::Authentic;
  ActivityCategory activity = ActivityCategory::Read;
  bool operator==(const ObservationEntry&) const = default;
};

/// Devices currently held in the observation state; at most one entry each.
class ObservationLedger {
 public:
  const ObservationEntry* find(const std::string& device_id) const;
  void enter(const std::string& device_id, ObservationEntry entry);
  bool resolve(const std::string& device_id);
  /// Resolves and returns every device whose observation outlived its
  /// holding time.
  std::vector<std::string> expire(const HoldingTimeTable& holding, TimeMs now_ms);

  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, ObservationEntry>& entries() const { return entries_; }
  bool operator==(const ObservationLedger&) const = default;

 private:
  std::map<std::string, ObservationEntry> entries_;
};

/// Strict: observation is expired once now - entered_at > holding time.
bool observation_expired(const ObservationEntry& entry, const HoldingTimeTable& holding, TimeMs now_ms);

/// One flowchart decision, evaluated in order:
///   Delete -> BlockAndRevoke; Suspicious -> SealAndStore;
///   Malicious -> ReportMalicious; Authentic & not observed -> Observe;
///   Authentic & observation expired -> ReportMalicious;
///   Authentic & within holding time -> ControlMessage(VerifyData).
/// Throws DeviceMismatchError when record and verdict disagree on the device.
ReactionOutcome react(const CleanRecord& record, const Verdict& verdict, ObservationLedger& ledger,
                      const HoldingTimeTable& holding, TimeMs now_ms);

struct SecurityParameters {
  Thresholds thresholds;
  HoldingTimeTable holding_times;
  bool operator==(const SecurityParameters&) const = default;
};

class UnknownDeviceError : public std::invalid_argument {
 public:
  explicit UnknownDeviceError(const std::string& device_id);
};

enum class ControlAck : std::uint8_t {
  Staged,       // update accepted, applies at the next event boundary
  Rejected,     // update would violate a parameter invariant; nothing changed
  Reconfirmed,  // VerifyData: last record passes cleansing again
  VerifyFailed, // VerifyData: last record no longer passes
  NoRecord,     // VerifyData: nothing recorded for the device yet
};

std::string_view to_string(ControlAck a);

/// Pure parameter update: validates the merged result, returns nullopt if it
/// would break an invariant.
std::optional<SecurityParameters> apply_update(const SecurityParameters& current, const ControlMessage& message);

/// Single logical MEC control server. Parameter changes are staged and become
/// live only at commit_at_boundary(), never mid-decision.
class ControlServer {
 public:
  using RecordLookup = std::function<std::optional<CleanRecord>(const std::string&)>;

  ControlServer(SecurityParameters initial, std::set<std::string> known_devices);

  /// Throws UnknownDeviceError for devices outside the scenario.
  ControlAck apply_control(const ControlMessage& message, const RecordLookup& last_record = {});

  /// Makes staged changes live. Returns true if anything changed.
  bool commit_at_boundary();

  const SecurityParameters& live() const { return live_; }
  bool has_pending() const { return pending_.has_value(); }

 private:
  SecurityParameters live_;
  std::optional<SecurityParameters> pending_;
  std::set<std::string> known_;
};

}  // namespace sentinel
