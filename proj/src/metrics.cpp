#include "sentinel/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace sentinel {

namespace {

ScenarioConfig config_of(const TraceSet& traces) {
  try {
    return config_from_json(Json::parse(traces.config));
  } catch (const nlohmann::json::parse_error& e) {
    throw TraceMismatch(std::string("config.json unreadable: ") + e.what());
  }
}

void check_header(const std::vector<Json>& lines, const std::string& stream, const std::string& hash) {
  if (lines.empty() || lines.front().value("type", "") != "header")
    throw TraceMismatch(stream + ": missing header line");
  const auto& h = lines.front();
  if (h.value("schema_version", 0) != kTraceSchemaVersion)
    throw TraceMismatch(stream + ": unsupported schema_version");
  if (h.value("config_hash", "") != hash)
    throw TraceMismatch(stream + ": config_hash " + h.value("config_hash", "") + " does not match " + hash);
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

MetricsReport score(const TraceSet& traces) {
  const auto config = config_of(traces);
  const auto hash = config_hash(config);

  const auto events = parse_jsonl(traces.events);
  const auto collector = parse_jsonl(traces.collector);
  const auto verdicts = parse_jsonl(traces.verdicts);
  const auto reactions = parse_jsonl(traces.reactions);
  check_header(events, "events", hash);
  check_header(collector, "collector", hash);
  check_header(verdicts, "verdicts", hash);
  check_header(reactions, "reactions", hash);

  MetricsReport report;
  report.config_hash = hash;

  using EventKey = std::pair<std::string, std::int64_t>;
  std::map<EventKey, int> attack_event;  // (device, seq) -> attack index
  for (std::size_t i = 1; i < events.size(); ++i) {
    const auto& e = events[i];
    ++report.counts.generated;
    const int attack = e.at("attack_index").get<int>();
    if (attack >= 0) attack_event[{e.at("device_id").get<std::string>(), e.at("seq_no").get<std::int64_t>()}] = attack;
  }

  std::vector<std::size_t> rejected_per_attack(config.attacks.size(), 0);
  std::vector<std::size_t> events_per_attack(config.attacks.size(), 0);
  for (const auto& [key, attack] : attack_event) ++events_per_attack[static_cast<std::size_t>(attack)];

  for (std::size_t i = 1; i < collector.size(); ++i) {
    const auto& c = collector[i];
    const auto decision = c.at("decision").get<std::string>();
    if (decision == "accept") {
      ++report.counts.cleaned;
      ++report.counts.deduped;
    } else if (decision == "dedup_drop") {
      ++report.counts.cleaned;
    } else if (decision == "blocked_drop") {
      ++report.counts.blocked;
    } else if (decision == "reject") {
      ++report.counts.rejected;
      auto it = attack_event.find({c.at("device_id").get<std::string>(), c.at("seq_no").get<std::int64_t>()});
      if (it != attack_event.end()) ++rejected_per_attack[static_cast<std::size_t>(it->second)];
    }
  }

  std::map<std::string, std::vector<TimeMs>> harmful;  // device -> reaction times (ascending)
  for (std::size_t i = 1; i < reactions.size(); ++i) {
    const auto& r = reactions[i];
    if (r.value("type", "") != "reaction") continue;
    const auto outcome = r.at("outcome").get<std::string>();
    if (outcome == "SealAndStore") ++report.counts.sealed;
    if (outcome == "ReportMalicious" || outcome == "BlockAndRevoke")
      harmful[r.at("device_id").get<std::string>()].push_back(r.at("t").get<TimeMs>());
  }

  std::set<std::string> attacked;
  std::size_t pairs = 0;
  std::size_t flagged_pairs = 0;
  std::vector<TimeMs> latencies;
  std::size_t oor_events = 0;
  std::size_t oor_rejected = 0;
  for (std::size_t i = 0; i < config.attacks.size(); ++i) {
    const auto& spec = config.attacks[i];
    AttackMetrics m;
    m.index = i;
    m.kind = spec.kind;
    m.start_ms = spec.start_ms;
    m.end_ms = spec.end_ms;
    m.targets = spec.target_devices;
    for (const auto& device : spec.target_devices) {
      attacked.insert(device);
      auto it = harmful.find(device);
      if (it == harmful.end()) continue;
      auto hit = std::find_if(it->second.begin(), it->second.end(),
                              [&](TimeMs t) { return t >= spec.start_ms && t <= spec.end_ms; });
      if (hit == it->second.end()) continue;
      m.flagged.push_back(device);
      m.latencies_ms.push_back(*hit - spec.start_ms);
    }
    m.detection_rate = ratio(m.flagged.size(), m.targets.size());
    m.attack_events = events_per_attack[i];
    m.falsified_rejected = rejected_per_attack[i];
    if (spec.kind == AttackKind::FDIA && spec.falsify_mode == FalsifyMode::OutOfRange) {
      oor_events += m.attack_events;
      oor_rejected += m.falsified_rejected;
    }
    pairs += m.targets.size();
    flagged_pairs += m.flagged.size();
    latencies.insert(latencies.end(), m.latencies_ms.begin(), m.latencies_ms.end());
    report.attacks.push_back(std::move(m));
  }

  std::size_t benign_devices = 0;
  std::size_t false_positives = 0;
  for (const auto& d : config.devices) {
    if (attacked.contains(d.id)) continue;
    ++benign_devices;
    if (harmful.contains(d.id)) ++false_positives;
  }

  report.detection_rate = ratio(flagged_pairs, pairs);
  report.false_positive_rate = ratio(false_positives, benign_devices);
  report.fdia_drop_rate = ratio(oor_rejected, oor_events);
  if (!latencies.empty()) {
    std::sort(latencies.begin(), latencies.end());
    const auto n = latencies.size();
    report.detection_latency_median_ms =
        n % 2 == 1 ? static_cast<double>(latencies[n / 2])
                   : (static_cast<double>(latencies[n / 2 - 1]) + static_cast<double>(latencies[n / 2])) / 2.0;
    report.detection_latency_max_ms = latencies.back();
  }
  return report;
}

MetricsReport score_dir(const std::filesystem::path& dir) { return score(read_trace_set(dir)); }

Json to_json(const MetricsReport& r) {
  Json attacks = Json::array();
  for (const auto& a : r.attacks)
    attacks.push_back({{"index", a.index},
                       {"kind", to_string(a.kind)},
                       {"start_ms", a.start_ms},
                       {"end_ms", a.end_ms},
                       {"targets", a.targets},
                       {"flagged", a.flagged},
                       {"detection_rate", opt(a.detection_rate)},
                       {"latencies_ms", a.latencies_ms},
                       {"attack_events", a.attack_events},
                       {"falsified_rejected", a.falsified_rejected}});
  return {{"config_hash", r.config_hash},
          {"detection_rate", opt(r.detection_rate)},
          {"false_positive_rate", opt(r.false_positive_rate)},
          {"detection_latency_ms",
           {{"median", opt(r.detection_latency_median_ms)},
            {"max", r.detection_latency_max_ms ? Json(*r.detection_latency_max_ms) : Json(nullptr)}}},
          {"fdia_drop_rate", opt(r.fdia_drop_rate)},
          {"counts",
           {{"generated", r.counts.generated},
            {"cleaned", r.counts.cleaned},
            {"deduped", r.counts.deduped},
            {"rejected", r.counts.rejected},
            {"sealed", r.counts.sealed},
            {"blocked", r.counts.blocked}}},
          {"attacks", std::move(attacks)}};
}

std::string to_csv(const MetricsReport& r) {
  std::ostringstream out;
  out << "attack_index,kind,start_ms,end_ms,targets,flagged,detection_rate,latency_median_ms,latency_max_ms,"
         "attack_events,falsified_rejected\n";
  for (const auto& a : r.attacks) {
    std::vector<TimeMs> lat = a.latencies_ms;
    std::sort(lat.begin(), lat.end());
    out << a.index << ',' << to_string(a.kind) << ',' << a.start_ms << ',' << a.end_ms << ',' << a.targets.size()
        << ',' << a.flagged.size() << ',';
    if (a.detection_rate) out << *a.detection_rate;
    out << ',';
    if (!lat.empty()) {
      const auto n = lat.size();
      out << (n % 2 == 1 ? static_cast<double>(lat[n / 2])
                         : (static_cast<double>(lat[n / 2 - 1]) + static_cast<double>(lat[n / 2])) / 2.0);
    }
    out << ',';
    if (!lat.empty()) out << lat.back();
    out << ',' << a.attack_events << ',' << a.falsified_rejected << '\n';
  }
  return out.str();
}

}  // namespace sentinel
