#include "sentinel/simulation.hpp"

#include <tbb/parallel_for.h>

#include <algorithm>

#include "sentinel/collector.hpp"
#include "sentinel/mec.hpp"

namespace sentinel {

std::vector<LabeledEvent> build_event_stream(const ScenarioConfig& config) {
  std::map<std::string, std::string> gateway_of;
  for (const auto& g : config.gateways)
    for (const auto& d : g.devices) gateway_of.emplace(d, g.id);
  std::map<std::string, DeviceProfile> profiles;
  for (const auto& d : config.devices) profiles.emplace(d.id, d);

  std::vector<LabeledEvent> stream;
  for (const auto& d : config.devices) {
    auto part = gen_traffic(d, config.seed, config.duration_ms, gateway_of[d.id]);
    stream.insert(stream.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  std::sort(stream.begin(), stream.end(), event_order);

  // DDoS before FDIA so flood events are never relabeled as falsified.
  for (std::size_t i = 0; i < config.attacks.size(); ++i)
    if (config.attacks[i].kind == AttackKind::DDoS)
      stream = inject_ddos(std::move(stream), config.attacks[i], profiles, derive_seed(config.seed, "attack", i),
                           static_cast<int>(i));
  for (std::size_t i = 0; i < config.attacks.size(); ++i)
    if (config.attacks[i].kind == AttackKind::FDIA)
      stream = inject_fdia(std::move(stream), config.attacks[i], derive_seed(config.seed, "attack", i),
                           static_cast<int>(i));
  return stream;
}

namespace {

Json collector_line(const CollectorOutcome& o, const std::string& gateway_id, TimeMs now_ms) {
  const auto& ev = o.intake.event;
  Json line = {{"t", now_ms},
               {"gateway_id", gateway_id},
               {"decision", to_string(o.decision)},
               {"device_id", ev.device_id},
               {"seq_no", ev.seq_no},
               {"out_of_range_source", o.intake.out_of_range_source}};
  if (o.reject_reason) line["reason"] = to_string(*o.reject_reason);
  if (o.record) {
    line["record"] = to_json(*o.record);
  } else {
    line["event"] = to_json(ev);
  }
  return line;
}

struct GatewayRuntime {
  Collector collector;
  std::string collector_lines;
  std::vector<std::size_t> pending;  // indices into the global stream for the current instant
};

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& raw_config, const RunOptions& options) {
  const ScenarioConfig config = validate_config(raw_config);
  const auto hash = config_hash(config);

  const auto stream = build_event_stream(config);

  MecEngine engine(config);
  std::vector<GatewayRuntime> gateways;
  gateways.reserve(config.gateways.size());
  for (const auto& g : config.gateways)
    gateways.push_back({Collector(g.id, std::set<std::string>(g.devices.begin(), g.devices.end()),
                                  config.thresholds.window_ms),
                        {},
                        {}});

  JsonlWriter events(hash, config.seed, "events");
  JsonlWriter collector(hash, config.seed, "collector");
  JsonlWriter verdicts(hash, config.seed, "verdicts");
  JsonlWriter reactions(hash, config.seed, "reactions");
  Bytes sealed_store;

  for (const auto& le : stream) {
    Json line = to_json(le.event);
    line["arrival_ms"] = le.event.timestamp_ms + config.hop_delay_ms;
    line["label"] = to_string(le.label);
    line["attack_index"] = le.attack_index;
    events.write(line);
  }

  const auto ticks = tick_schedule(config);
  std::size_t next_event = 0;
  std::size_t next_tick = 0;

  auto run_gateway = [&](std::size_t g, TimeMs now, bool is_tick) {
    auto& rt = gateways[g];
    auto& pipeline = engine.pipeline(g);
    const auto& params = engine.params();
    rt.collector.set_dedup_window(params.thresholds.window_ms);
    for (auto idx : rt.pending) {
      rt.collector.ingest(stream[idx].event);
      for (const auto& outcome : rt.collector.drain(now)) {
        rt.collector_lines += collector_line(outcome, rt.collector.gateway_id(), now).dump();
        rt.collector_lines += '\n';
        if (outcome.decision == CollectorDecision::Accept) {
          auto reaction = pipeline.on_accept(*outcome.record, now, params);
          if (is_harmful(reaction))
            rt.collector.block(outcome_device(reaction), now, config.unblock_delay_ms);
        } else if (outcome.decision == CollectorDecision::BlockedDrop) {
          pipeline.on_blocked_drop(outcome.intake.event, now);
        }
      }
    }
    rt.pending.clear();
    if (is_tick)
      for (const auto& device : pipeline.on_tick(now, params))
        rt.collector.block(device, now, config.unblock_delay_ms);
  };

  while (next_event < stream.size() || next_tick < ticks.size()) {
    const TimeMs event_time = next_event < stream.size()
                                  ? stream[next_event].event.timestamp_ms + config.hop_delay_ms
                                  : std::numeric_limits<TimeMs>::max();
    const TimeMs tick_time = next_tick < ticks.size() ? ticks[next_tick] : std::numeric_limits<TimeMs>::max();
    const TimeMs now = std::min(event_time, tick_time);
    const bool is_tick = tick_time == now;
    if (is_tick) ++next_tick;

    while (next_event < stream.size() && stream[next_event].event.timestamp_ms + config.hop_delay_ms == now) {
      gateways[engine.gateway_index(stream[next_event].event.gateway_id)].pending.push_back(next_event);
      ++next_event;
    }

    if (options.parallel && gateways.size() > 1) {
      tbb::parallel_for(std::size_t{0}, gateways.size(), [&](std::size_t g) { run_gateway(g, now, is_tick); });
    } else {
      for (std::size_t g = 0; g < gateways.size(); ++g) run_gateway(g, now, is_tick);
    }

    for (auto& rt : gateways) collector.append_raw(std::exchange(rt.collector_lines, {}));
    engine.barrier(now, verdicts, reactions, sealed_store);
  }

  Json blocklist = Json::object();
  for (const auto& rt : gateways) {
    Json entries = Json::object();
    for (const auto& [device, until] : rt.collector.blocklist()) entries[device] = until ? Json(*until) : Json(nullptr);
    blocklist[rt.collector.gateway_id()] = std::move(entries);
  }

  ScenarioResult result;
  result.config_hash = hash;
  result.traces.config = to_json(config).dump(2) + "\n";
  result.traces.events = events.text();
  result.traces.collector = collector.text();
  result.traces.verdicts = verdicts.text();
  result.traces.reactions = reactions.text();
  result.traces.sealed_store = std::move(sealed_store);
  result.traces.blocklist = blocklist.dump(2) + "\n";
  result.traces.detector_snapshot = engine.detector_snapshot().dump() + "\n";
  result.metrics = score(result.traces);
  return result;
}

}  // namespace sentinel
