#include "sentinel/replay.hpp"

#include <limits>
#include <sstream>

#include "sentinel/mec.hpp"

namespace sentinel {

namespace {

std::string first_difference(const std::string& name, const std::string& expected, const std::string& actual) {
  std::istringstream a(expected);
  std::istringstream b(actual);
  std::string la;
  std::string lb;
  for (std::size_t line = 1;; ++line) {
    const bool ha = static_cast<bool>(std::getline(a, la));
    const bool hb = static_cast<bool>(std::getline(b, lb));
    if (!ha && !hb) return {};
    if (ha != hb || la != lb)
      return name + " line " + std::to_string(line) + ": recorded '" + (ha ? la : "<eof>") + "' vs replayed '" +
             (hb ? lb : "<eof>") + "'";
  }
}

}  // namespace

ReplayResult replay(const TraceSet& traces) {
  ScenarioConfig config;
  try {
    config = config_from_json(Json::parse(traces.config));
  } catch (const nlohmann::json::parse_error& e) {
    throw TraceMismatch(std::string("config.json unreadable: ") + e.what());
  }
  const auto hash = config_hash(config);
  const auto lines = parse_jsonl(traces.collector);
  for (const auto* text : {&traces.verdicts, &traces.reactions}) {
    const auto header = parse_jsonl(text->substr(0, text->find('\n')));
    if (header.empty() || header.front().value("config_hash", "") != hash)
      throw TraceMismatch("trace header does not match config.json");
  }
  if (lines.empty() || lines.front().value("config_hash", "") != hash)
    throw TraceMismatch("collector trace header does not match config.json");

  MecEngine engine(config);
  JsonlWriter verdicts(hash, config.seed, "verdicts");
  JsonlWriter reactions(hash, config.seed, "reactions");
  Bytes sealed;

  const auto ticks = tick_schedule(config);
  std::size_t next_line = 1;
  std::size_t next_tick = 0;
  constexpr auto kNever = std::numeric_limits<TimeMs>::max();
  while (next_line < lines.size() || next_tick < ticks.size()) {
    const TimeMs line_time = next_line < lines.size() ? lines[next_line].at("t").get<TimeMs>() : kNever;
    const TimeMs tick_time = next_tick < ticks.size() ? ticks[next_tick] : kNever;
    const TimeMs now = std::min(line_time, tick_time);
    const auto& params = engine.params();

    for (; next_line < lines.size() && lines[next_line].at("t").get<TimeMs>() == now; ++next_line) {
      const auto& line = lines[next_line];
      auto& pipeline = engine.pipeline(engine.gateway_index(line.at("gateway_id").get<std::string>()));
      const auto decision = line.at("decision").get<std::string>();
      if (decision == "accept") {
        pipeline.on_accept(clean_record_from_json(line.at("record")), now, params);
      } else if (decision == "blocked_drop") {
        pipeline.on_blocked_drop(event_from_json(line.at("event")), now);
      }
    }
    if (tick_time == now) {
      ++next_tick;
      for (std::size_t g = 0; g < engine.gateway_count(); ++g) engine.pipeline(g).on_tick(now, params);
    }
    engine.barrier(now, verdicts, reactions, sealed);
  }

  ReplayResult result;
  result.verdicts = verdicts.text();
  result.reactions = reactions.text();
  result.sealed_store = std::move(sealed);
  result.divergence = first_difference("verdicts.jsonl", traces.verdicts, result.verdicts);
  if (result.divergence.empty())
    result.divergence = first_difference("reactions.jsonl", traces.reactions, result.reactions);
  result.identical = result.divergence.empty();
  return result;
}

ReplayResult replay_dir(const std::filesystem::path& dir) { return replay(read_trace_set(dir)); }

}  // namespace sentinel
