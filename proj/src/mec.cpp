#include "sentinel/mec.hpp"

#include "sentinel/traffic.hpp"

namespace sentinel {

GatewayPipeline::GatewayPipeline(std::string gateway_id, const DetectorSettings& settings, Sealer sealer)
    : gateway_id_(std::move(gateway_id)),
      detector_(settings.smoothing_alpha, settings.p_alert),
      sealer_(std::move(sealer)) {}

void GatewayPipeline::emit_reaction(const ReactionOutcome& outcome, TimeMs now_ms, const char* source,
                                    const CleanRecord* record) {
  Json line = {{"t", now_ms},
               {"type", "reaction"},
               {"source", source},
               {"gateway_id", gateway_id_},
               {"device_id", outcome_device(outcome)},
               {"outcome", outcome_name(outcome)}};
  if (record) {
    line["seq_no"] = record->event.seq_no;
    line["activity"] = to_string(record->event.activity);
  }
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Observe>) {
          line["started_at_ms"] = o.started_at_ms;
        } else if constexpr (std::is_same_v<T, ReportMalicious>) {
          line["cause"] = to_string(o.cause);
          line["actions"] = {"BlockAccess", "Monitor"};
        } else if constexpr (std::is_same_v<T, ControlMessage>) {
          line["kind"] = to_string(o.kind);
          line["followup"] = to_string(ControlKind::UpdateSecuritySettings);
        }
      },
      outcome);
  out_.reaction_lines += line.dump();
  out_.reaction_lines += '\n';
}

ReactionOutcome GatewayPipeline::on_accept(const CleanRecord& record, TimeMs now_ms,
                                           const SecurityParameters& params) {
  last_records_.insert_or_assign(record.event.device_id, record);
  const auto verdict = detector_.on_record(record, params.thresholds, now_ms);
  out_.verdict_lines += to_json(verdict).dump();
  out_.verdict_lines += '\n';

  auto outcome = react(record, verdict, ledger_, params.holding_times, now_ms);
  emit_reaction(outcome, now_ms, "event", &record);

  if (const auto* s = std::get_if<SealAndStore>(&outcome)) {
    append_frame(out_.sealed_frames, sealer_.seal(s->record));
  } else if (const auto* r = std::get_if<ReportMalicious>(&outcome)) {
    monitored_.insert(r->device_id);
  } else if (const auto* c = std::get_if<ControlMessage>(&outcome)) {
    out_.control_requests.push_back(*c);
    // Harmless resolution: verify, then refresh the security settings.
    out_.control_requests.push_back({c->device_id, ControlKind::UpdateSecuritySettings, std::nullopt, std::nullopt});
  }
  return outcome;
}

void GatewayPipeline::on_blocked_drop(const DeviceEvent& event, TimeMs now_ms) {
  if (!monitored_.contains(event.device_id)) return;
  Json line = {{"t", now_ms},
               {"type", "monitor"},
               {"gateway_id", gateway_id_},
               {"device_id", event.device_id},
               {"seq_no", event.seq_no},
               {"activity", to_string(event.activity)},
               {"timestamp_ms", event.timestamp_ms}};
  out_.reaction_lines += line.dump();
  out_.reaction_lines += '\n';
}

std::vector<std::string> GatewayPipeline::on_tick(TimeMs now_ms, const SecurityParameters& params) {
  for (const auto& v : detector_.on_tick(params.thresholds, now_ms)) {
    out_.verdict_lines += to_json(v).dump();
    out_.verdict_lines += '\n';
  }
  auto expired = ledger_.expire(params.holding_times, now_ms);
  for (const auto& device : expired) {
    emit_reaction(ReportMalicious{device, MaliciousCause::HoldingTimeExceeded}, now_ms, "tick", nullptr);
    monitored_.insert(device);
  }
  return expired;
}

GatewayPipeline::Output GatewayPipeline::take_output() { return std::exchange(out_, Output{}); }

std::optional<CleanRecord> GatewayPipeline::last_record(const std::string& device_id) const {
  auto it = last_records_.find(device_id);
  if (it == last_records_.end()) return std::nullopt;
  return it->second;
}

std::array<std::uint8_t, 16> gateway_nonce_prefix(std::uint64_t seed, const std::string& gateway_id) {
  std::array<std::uint8_t, 16> prefix{};
  const auto a = derive_seed(seed, "nonce:" + gateway_id, 0);
  const auto b = derive_seed(seed, "nonce:" + gateway_id, 1);
  for (int i = 0; i < 8; ++i) {
    prefix[i] = static_cast<std::uint8_t>(a >> (8 * i));
    prefix[8 + i] = static_cast<std::uint8_t>(b >> (8 * i));
  }
  return prefix;
}

SealKey scenario_key(const ScenarioConfig& config) {
  return config.seal_key_hex ? SealKey::from_hex(*config.seal_key_hex) : SealKey::derive_from_seed(config.seed);
}

std::vector<TimeMs> tick_schedule(const ScenarioConfig& config) {
  std::vector<TimeMs> ticks;
  const TimeMs last = config.duration_ms + config.hop_delay_ms;
  for (TimeMs t = config.detector.tick_ms; t <= last; t += config.detector.tick_ms) ticks.push_back(t);
  return ticks;
}

namespace {

std::set<std::string> all_devices(const ScenarioConfig& config) {
  std::set<std::string> ids;
  for (const auto& d : config.devices) ids.insert(d.id);
  return ids;
}

}  // namespace

MecEngine::MecEngine(const ScenarioConfig& config)
    : control_(SecurityParameters{config.thresholds, config.holding_times}, all_devices(config)) {
  const auto key = scenario_key(config);
  pipelines_.reserve(config.gateways.size());
  for (std::size_t g = 0; g < config.gateways.size(); ++g) {
    const auto& id = config.gateways[g].id;
    index_.emplace(id, g);
    pipelines_.emplace_back(id, config.detector, Sealer(key, gateway_nonce_prefix(config.seed, id)));
  }
}

std::size_t MecEngine::gateway_index(const std::string& gateway_id) const {
  auto it = index_.find(gateway_id);
  if (it == index_.end()) throw TraceMismatch("unknown gateway " + gateway_id);
  return it->second;
}

void MecEngine::barrier(TimeMs now_ms, JsonlWriter& verdicts, JsonlWriter& reactions, Bytes& sealed_store) {
  for (auto& pipeline : pipelines_) {
    auto out = pipeline.take_output();
    verdicts.append_raw(out.verdict_lines);
    reactions.append_raw(out.reaction_lines);
    sealed_store.insert(sealed_store.end(), out.sealed_frames.begin(), out.sealed_frames.end());
    for (const auto& msg : out.control_requests) {
      const auto ack = control_.apply_control(msg, [&](const std::string& d) { return pipeline.last_record(d); });
      reactions.write({{"t", now_ms},
                       {"type", "control"},
                       {"gateway_id", pipeline.gateway_id()},
                       {"device_id", msg.device_id},
                       {"kind", to_string(msg.kind)},
                       {"ack", to_string(ack)}});
    }
  }
  if (control_.commit_at_boundary())
    reactions.write({{"t", now_ms},
                     {"type", "parameters_committed"},
                     {"thresholds", to_json(control_.live().thresholds)},
                     {"holding_times", to_json(control_.live().holding_times)}});
}

Json MecEngine::detector_snapshot() const {
  Json out = Json::object();
  for (const auto& p : pipelines_) out[p.gateway_id()] = to_json(p.detector());
  return out;
}

}  // namespace sentinel
