#include "sentinel/json_io.hpp"

#include <fstream>
#include <sstream>

#include "sentinel/sealing.hpp"

namespace sentinel {

namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& what) {
  throw ConfigError(ConfigErrc::ParseError, path, what);
}

const Json& field(const Json& j, const std::string& path, const char* key) {
  if (!j.is_object()) parse_fail(path, "expected object");
  auto it = j.find(key);
  if (it == j.end()) parse_fail(path + "/" + key, "missing field");
  return *it;
}

template <typename T>
T get_as(const Json& j, const std::string& path) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!j.is_number()) parse_fail(path, "expected number");
    } else if constexpr (std::is_integral_v<T>) {
      if (!j.is_number_integer()) parse_fail(path, "expected integer");
      if constexpr (std::is_unsigned_v<T>)
        if (j.is_number_integer() && !j.is_number_unsigned()) parse_fail(path, "expected unsigned integer");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!j.is_string()) parse_fail(path, "expected string");
    }
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    parse_fail(path, e.what());
  }
}

template <typename T>
T get_field(const Json& j, const std::string& path, const char* key) {
  return get_as<T>(field(j, path, key), path + "/" + key);
}

PayloadRange range_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) parse_fail(path, "expected [min, max]");
  return {get_as<double>(j[0], path + "/0"), get_as<double>(j[1], path + "/1")};
}

Json range_to_json(const PayloadRange& r) { return Json::array({r.min, r.max}); }

template <typename Enum, typename Parse>
Enum enum_field(const Json& j, const std::string& path, const char* key, Parse parse) {
  const auto text = get_field<std::string>(j, path, key);
  auto v = parse(text);
  if (!v) parse_fail(path + "/" + key, "unknown value '" + text + "'");
  return *v;
}

std::optional<AttackKind> parse_kind(std::string_view s) {
  if (s == "fdia") return AttackKind::FDIA;
  if (s == "ddos") return AttackKind::DDoS;
  return std::nullopt;
}

std::optional<FalsifyMode> parse_mode(std::string_view s) {
  if (s == "out_of_range") return FalsifyMode::OutOfRange;
  if (s == "in_range_bias") return FalsifyMode::InRangeBias;
  return std::nullopt;
}

// Record-level (non-config) helpers throw invalid_argument.
template <typename T>
T req(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw std::invalid_argument(std::string("missing field ") + key);
  return it->get<T>();
}

}  // namespace

Json to_json(const Thresholds& t) {
  return {{"theta_s", t.theta_s}, {"theta_m", t.theta_m}, {"window_ms", t.window_ms}};
}

Json to_json(const HoldingTimeTable& h) {
  Json out = Json::object();
  for (auto s : kStates) {
    Json row = Json::object();
    for (auto a : kActivities) row[std::string(to_string(a))] = h.at(s, a);
    out[std::string(to_string(s))] = std::move(row);
  }
  return out;
}

Json to_json(const ScenarioConfig& c) {
  Json devices = Json::array();
  for (const auto& d : c.devices)
    devices.push_back({{"id", d.id},
                       {"payload_range", range_to_json(d.payload_range)},
                       {"rate_per_s", d.rate_per_s},
                       {"activity_mix", d.activity_mix}});
  Json gateways = Json::array();
  for (const auto& g : c.gateways) gateways.push_back({{"id", g.id}, {"devices", g.devices}});
  Json attacks = Json::array();
  for (const auto& a : c.attacks) {
    Json aj = {{"kind", to_string(a.kind)},
               {"target_devices", a.target_devices},
               {"start_ms", a.start_ms},
               {"end_ms", a.end_ms},
               {"intensity", a.intensity}};
    if (a.kind == AttackKind::FDIA) {
      aj["falsify_mode"] = to_string(a.falsify_mode);
      aj["falsify_offset"] = a.falsify_offset;
    }
    attacks.push_back(std::move(aj));
  }
  Json out = {{"seed", c.seed},
              {"duration_ms", c.duration_ms},
              {"devices", std::move(devices)},
              {"gateways", std::move(gateways)},
              {"thresholds", to_json(c.thresholds)},
              {"holding_times", to_json(c.holding_times)},
              {"attacks", std::move(attacks)},
              {"detector",
               {{"smoothing_alpha", c.detector.smoothing_alpha},
                {"tick_ms", c.detector.tick_ms},
                {"p_alert", c.detector.p_alert}}},
              {"hop_delay_ms", c.hop_delay_ms},
              {"unblock_delay_ms", c.unblock_delay_ms ? Json(*c.unblock_delay_ms) : Json(nullptr)}};
  if (c.seal_key_hex) out["seal_key_hex"] = *c.seal_key_hex;
  return out;
}

Thresholds thresholds_from_json(const Json& j, const std::string& path) {
  Thresholds t;
  t.theta_s = get_field<std::int64_t>(j, path, "theta_s");
  t.theta_m = get_field<std::int64_t>(j, path, "theta_m");
  t.window_ms = get_field<std::int64_t>(j, path, "window_ms");
  return t;
}

HoldingTimeTable holding_times_from_json(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return HoldingTimeTable(j.get<TimeMs>());
  HoldingTimeTable h;
  for (auto s : kStates) {
    const std::string skey(to_string(s));
    const auto& row = field(j, path, skey.c_str());
    for (auto a : kActivities) {
      const std::string akey(to_string(a));
      h.set(s, a, get_field<TimeMs>(row, path + "/" + skey, akey.c_str()));
    }
  }
  return h;
}

ScenarioConfig config_from_json(const Json& j) {
  const std::string root;
  if (!j.is_object()) parse_fail("/", "expected object");
  ScenarioConfig c;
  c.seed = get_field<std::uint64_t>(j, root, "seed");
  c.duration_ms = get_field<TimeMs>(j, root, "duration_ms");

  const auto& devices = field(j, root, "devices");
  if (!devices.is_array()) parse_fail("/devices", "expected array");
  for (std::size_t i = 0; i < devices.size(); ++i) {
    const auto path = "/devices/" + std::to_string(i);
    const auto& dj = devices[i];
    DeviceProfile d;
    d.id = get_field<std::string>(dj, path, "id");
    d.payload_range = range_from_json(field(dj, path, "payload_range"), path + "/payload_range");
    d.rate_per_s = get_field<double>(dj, path, "rate_per_s");
    const auto& mix = field(dj, path, "activity_mix");
    if (!mix.is_array() || mix.size() != 3) parse_fail(path + "/activity_mix", "expected [read, update, delete]");
    for (std::size_t k = 0; k < 3; ++k)
      d.activity_mix[k] = get_as<double>(mix[k], path + "/activity_mix/" + std::to_string(k));
    c.devices.push_back(std::move(d));
  }

  const auto& gateways = field(j, root, "gateways");
  if (!gateways.is_array()) parse_fail("/gateways", "expected array");
  for (std::size_t i = 0; i < gateways.size(); ++i) {
    const auto path = "/gateways/" + std::to_string(i);
    GatewaySpec g;
    g.id = get_field<std::string>(gateways[i], path, "id");
    const auto& devs = field(gateways[i], path, "devices");
    if (!devs.is_array()) parse_fail(path + "/devices", "expected array");
    for (std::size_t k = 0; k < devs.size(); ++k)
      g.devices.push_back(get_as<std::string>(devs[k], path + "/devices/" + std::to_string(k)));
    c.gateways.push_back(std::move(g));
  }

  c.thresholds = thresholds_from_json(field(j, root, "thresholds"), "/thresholds");
  c.holding_times = holding_times_from_json(field(j, root, "holding_times"), "/holding_times");

  if (auto it = j.find("attacks"); it != j.end()) {
    if (!it->is_array()) parse_fail("/attacks", "expected array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto path = "/attacks/" + std::to_string(i);
      const auto& aj = (*it)[i];
      AttackSpec a;
      a.kind = enum_field<AttackKind>(aj, path, "kind", parse_kind);
      const auto& targets = field(aj, path, "target_devices");
      if (!targets.is_array()) parse_fail(path + "/target_devices", "expected array");
      for (std::size_t k = 0; k < targets.size(); ++k)
        a.target_devices.push_back(get_as<std::string>(targets[k], path + "/target_devices/" + std::to_string(k)));
      a.start_ms = get_field<TimeMs>(aj, path, "start_ms");
      a.end_ms = get_field<TimeMs>(aj, path, "end_ms");
      a.intensity = get_field<double>(aj, path, "intensity");
      if (a.kind == AttackKind::FDIA) {
        a.falsify_mode = enum_field<FalsifyMode>(aj, path, "falsify_mode", parse_mode);
        a.falsify_offset = get_field<double>(aj, path, "falsify_offset");
      }
      c.attacks.push_back(std::move(a));
    }
  }

  if (auto it = j.find("detector"); it != j.end()) {
    const std::string path = "/detector";
    if (it->contains("smoothing_alpha")) c.detector.smoothing_alpha = get_field<double>(*it, path, "smoothing_alpha");
    if (it->contains("tick_ms")) c.detector.tick_ms = get_field<TimeMs>(*it, path, "tick_ms");
    if (it->contains("p_alert")) c.detector.p_alert = get_field<double>(*it, path, "p_alert");
  }
  if (j.contains("hop_delay_ms")) c.hop_delay_ms = get_field<TimeMs>(j, root, "hop_delay_ms");
  if (auto it = j.find("unblock_delay_ms"); it != j.end() && !it->is_null())
    c.unblock_delay_ms = get_as<TimeMs>(*it, "/unblock_delay_ms");
  if (auto it = j.find("seal_key_hex"); it != j.end() && !it->is_null())
    c.seal_key_hex = get_as<std::string>(*it, "/seal_key_hex");
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    parse_fail("/", e.what());
  }
  return config_from_json(j);
}

Json to_json(const DeviceEvent& e) {
  return {{"device_id", e.device_id},
          {"gateway_id", e.gateway_id},
          {"seq_no", e.seq_no},
          {"timestamp_ms", e.timestamp_ms},
          {"activity", to_string(e.activity)},
          {"payload_value", e.payload_value},
          {"payload_range", range_to_json(e.payload_range)}};
}

DeviceEvent event_from_json(const Json& j) {
  DeviceEvent e;
  e.device_id = req<std::string>(j, "device_id");
  e.gateway_id = req<std::string>(j, "gateway_id");
  e.seq_no = req<std::int64_t>(j, "seq_no");
  e.timestamp_ms = req<TimeMs>(j, "timestamp_ms");
  auto act = parse_activity(req<std::string>(j, "activity"));
  if (!act) throw std::invalid_argument("unknown activity");
  e.activity = *act;
  e.payload_value = req<double>(j, "payload_value");
  const auto range = req<std::array<double, 2>>(j, "payload_range");
  e.payload_range = {range[0], range[1]};
  return e;
}

Json to_json(const CleanRecord& r) {
  Json j = to_json(r.event);
  Json flags = Json::array();
  for (auto f : r.cleansing_flags) flags.push_back(to_string(f));
  j["cleansing_flags"] = std::move(flags);
  return j;
}

CleanRecord clean_record_from_json(const Json& j) {
  CleanRecord r{event_from_json(j), {}};
  for (const auto& f : req<std::vector<std::string>>(j, "cleansing_flags")) {
    if (f != to_string(CleansingFlag::TimestampNormalized)) throw std::invalid_argument("unknown flag " + f);
    r.cleansing_flags.insert(CleansingFlag::TimestampNormalized);
  }
  return r;
}

Json to_json(const Verdict& v) {
  return {{"device_id", v.device_id},
          {"timestamp_ms", v.timestamp_ms},
          {"state", to_string(v.state)},
          {"count", v.count},
          {"predicted_next", v.predicted_next},
          {"alert", v.alert},
          {"source", v.source == VerdictSource::Event ? "event" : "tick"}};
}

Json to_json(const DeviceTracker& t) {
  Json window = Json::array();
  for (const auto& e : t.window.events) window.push_back({e.timestamp_ms, to_string(e.activity)});
  return {{"device_id", t.device_id},
          {"window", std::move(window)},
          {"current_state", to_string(t.current_state)},
          {"state_entered_at_ms", t.state_entered_at_ms},
          {"transition_counts", t.chain.transition_counts},
          {"smoothing_alpha", t.chain.smoothing_alpha},
          {"last_seq_no", t.last_seq_no}};
}

DeviceTracker tracker_from_json(const Json& j) {
  DeviceTracker t;
  t.device_id = req<std::string>(j, "device_id");
  for (const auto& e : j.at("window")) {
    auto act = parse_activity(e.at(1).get<std::string>());
    if (!act) throw std::invalid_argument("unknown activity in window");
    t.window.events.push_back({e.at(0).get<TimeMs>(), *act});
  }
  auto state = parse_state(req<std::string>(j, "current_state"));
  if (!state) throw std::invalid_argument("unknown state");
  t.current_state = *state;
  t.state_entered_at_ms = req<TimeMs>(j, "state_entered_at_ms");
  t.chain.transition_counts = req<std::array<std::array<std::uint64_t, 3>, 3>>(j, "transition_counts");
  t.chain.smoothing_alpha = req<double>(j, "smoothing_alpha");
  t.last_seq_no = req<std::int64_t>(j, "last_seq_no");
  return t;
}

Json to_json(const Detector& d) {
  Json trackers = Json::array();
  for (const auto& [id, t] : d.trackers()) trackers.push_back(to_json(t));
  return {{"smoothing_alpha", d.smoothing_alpha()}, {"p_alert", d.p_alert()}, {"trackers", std::move(trackers)}};
}

Detector detector_from_json(const Json& j) {
  std::map<std::string, DeviceTracker> trackers;
  for (const auto& tj : j.at("trackers")) {
    auto t = tracker_from_json(tj);
    auto id = t.device_id;
    trackers.emplace(std::move(id), std::move(t));
  }
  return Detector(req<double>(j, "smoothing_alpha"), req<double>(j, "p_alert"), std::move(trackers));
}

std::string canonical_dump(const Json& j) { return j.dump(); }

std::string config_hash(const ScenarioConfig& config) { return sha256_hex(canonical_dump(to_json(config))); }

}  // namespace sentinel
