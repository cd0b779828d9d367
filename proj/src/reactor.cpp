#include "sentinel/reactor.hpp"

namespace sentinel {

std::string_view to_string(ControlKind k) {
  return k == ControlKind::VerifyData ? "VerifyData" : "UpdateSecuritySettings";
}

std::string_view to_string(MaliciousCause c) {
  return c == MaliciousCause::DetectorVerdict ? "detector_verdict" : "holding_time_exceeded";
}

std::string_view to_string(ControlAck a) {
  switch (a) {
    case ControlAck::Staged: return "staged";
    case ControlAck::Rejected: return "rejected";
    case ControlAck::Reconfirmed: return "reconfirmed";
    case ControlAck::VerifyFailed: return "verify_failed";
    case ControlAck::NoRecord: return "no_record";
  }
  return "?";
}

std::string_view outcome_name(const ReactionOutcome& outcome) {
  struct {
    std::string_view operator()(const BlockAndRevoke&) const { return "BlockAndRevoke"; }
    std::string_view operator()(const SealAndStore&) const { return "SealAndStore"; }
    std::string_view operator()(const Observe&) const { return "Observe"; }
    std::string_view operator()(const ReportMalicious&) const { return "ReportMalicious"; }
    std::string_view operator()(const ControlMessage&) const { return "ControlMessage"; }
  } visitor;
  return std::visit(visitor, outcome);
}

bool is_harmful(const ReactionOutcome& outcome) {
  return std::holds_alternative<BlockAndRevoke>(outcome) || std::holds_alternative<ReportMalicious>(outcome);
}

const std::string& outcome_device(const ReactionOutcome& outcome) {
  return std::visit(
      [](const auto& o) -> const std::string& {
        if constexpr (std::is_same_v<std::decay_t<decltype(o)>, SealAndStore>) {
          return o.record.event.device_id;
        } else {
          return o.device_id;
        }
      },
      outcome);
}

const ObservationEntry* ObservationLedger::find(const std::string& device_id) const {
  auto it = entries_.find(device_id);
  return it == entries_.end() ? nullptr : &it->second;
}

void ObservationLedger::enter(const std::string& device_id, ObservationEntry entry) {
  entries_.insert_or_assign(device_id, entry);
}

bool ObservationLedger::resolve(const std::string& device_id) { return entries_.erase(device_id) > 0; }

bool observation_expired(const ObservationEntry& entry, const HoldingTimeTable& holding, TimeMs now_ms) {
  return now_ms - entry.entered_at_ms > holding.at(entry.state, entry.activity);
}

std::vector<std::string> ObservationLedger::expire(const HoldingTimeTable& holding, TimeMs now_ms) {
  std::vector<std::string> expired;
  for (auto it = entries_.begin(); it != entries_.end();) {
    if (observation_expired(it->second, holding, now_ms)) {
      expired.push_back(it->first);
      it = entries_.erase(it);
    } else {
      ++it;
    }
  }
  return expired;
}

ReactionOutcome react(const CleanRecord& record, const Verdict& verdict, ObservationLedger& ledger,
                      const HoldingTimeTable& holding, TimeMs now_ms) {
  const auto& device = record.event.device_id;
  if (verdict.device_id != device) throw DeviceMismatchError(verdict.device_id, device);

  if (record.event.activity == ActivityCategory::Delete) {
    ledger.resolve(device);
    return BlockAndRevoke{device};
  }
  switch (verdict.state) {
    case SecurityState::Suspicious:
      return SealAndStore{record};
    case SecurityState::Malicious:
      ledger.resolve(device);
      return ReportMalicious{device, MaliciousCause::DetectorVerdict};
    case SecurityState::Authentic:
      break;
  }

  const auto* entry = ledger.find(device);
  if (entry == nullptr) {
    ledger.enter(device, {now_ms, verdict.state, record.event.activity});
    return Observe{device, now_ms};
  }
  const bool expired = observation_expired(*entry, holding, now_ms);
  ledger.resolve(device);
  if (expired) return ReportMalicious{device, MaliciousCause::HoldingTimeExceeded};
  return ControlMessage{device, ControlKind::VerifyData, std::nullopt, std::nullopt};
}

UnknownDeviceError::UnknownDeviceError(const std::string& device_id)
    : std::invalid_argument("UnknownDevice: " + device_id) {}

std::optional<SecurityParameters> apply_update(const SecurityParameters& current, const ControlMessage& message) {
  SecurityParameters next = current;
  if (message.thresholds) next.thresholds = *message.thresholds;
  if (message.holding_times) next.holding_times = *message.holding_times;
  if (check_thresholds(next.thresholds) || check_holding_times(next.holding_times)) return std::nullopt;
  return next;
}

ControlServer::ControlServer(SecurityParameters initial, std::set<std::string> known_devices)
    : live_(std::move(initial)), known_(std::move(known_devices)) {}

ControlAck ControlServer::apply_control(const ControlMessage& message, const RecordLookup& last_record) {
  if (!known_.contains(message.device_id)) throw UnknownDeviceError(message.device_id);

  if (message.kind == ControlKind::VerifyData) {
    std::optional<CleanRecord> rec;
    if (last_record) rec = last_record(message.device_id);
    if (!rec) return ControlAck::NoRecord;
    return check_event(rec->event) ? ControlAck::VerifyFailed : ControlAck::Reconfirmed;
  }

  auto next = apply_update(pending_ ? *pending_ : live_, message);
  if (!next) return ControlAck::Rejected;
  pending_ = std::move(*next);
  return ControlAck::Staged;
}

bool ControlServer::commit_at_boundary() {
  if (!pending_) return false;
  const bool changed = *pending_ != live_;
  live_ = std::move(*pending_);
  pending_.reset();
  return changed;
}

}  // namespace sentinel
