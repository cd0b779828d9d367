#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sentinel/json_io.hpp"
#include "sentinel/reactor.hpp"
#include "sentinel/replay.hpp"
#include "sentinel/simulation.hpp"

namespace py = pybind11;
using namespace sentinel;

namespace {

// Structured values cross the boundary as JSON text; the Python package
// wraps these with json.loads / json.dumps.

std::string validate(const std::string& config_json) {
  return canonical_dump(to_json(validate_config(config_from_json(Json::parse(config_json)))));
}

std::string state_name(std::int64_t count, std::int64_t theta_s, std::int64_t theta_m) {
  return std::string(to_string(assess_state(count, {theta_s, theta_m, 1})));
}

std::string dedupe_json(const std::string& records_json) {
  std::vector<CleanRecord> batch;
  for (const auto& j : Json::parse(records_json)) batch.push_back(clean_record_from_json(j));
  Json out = Json::array();
  for (const auto& r : dedupe(batch)) out.push_back(to_json(r));
  return out.dump();
}

std::vector<double> probabilities(const std::vector<std::pair<std::string, std::string>>& transitions,
                                  const std::string& from, double alpha) {
  MarkovChainModel chain;
  chain.smoothing_alpha = alpha;
  auto state = [](const std::string& s) {
    auto st = parse_state(s);
    if (!st) throw py::value_error("unknown state: " + s);
    return *st;
  };
  for (const auto& [a, b] : transitions) observe_transition(chain, state(a), state(b));
  const auto row = transition_probabilities(chain, state(from));
  return {row.begin(), row.end()};
}

std::string react_outcome(const std::string& activity, const std::string& state,
                          std::optional<TimeMs> observed_since_ms, TimeMs holding_ms, TimeMs now_ms) {
  const auto a = parse_activity(activity);
  const auto s = parse_state(state);
  if (!a || !s) throw py::value_error("unknown activity or state");
  DeviceEvent e;
  e.device_id = "device";
  e.timestamp_ms = now_ms;
  e.activity = *a;
  Verdict v;
  v.device_id = e.device_id;
  v.timestamp_ms = now_ms;
  v.state = *s;
  ObservationLedger ledger;
  if (observed_since_ms) ledger.enter(e.device_id, {*observed_since_ms, SecurityState::Authentic, *a});
  return std::string(outcome_name(react({e, {}}, v, ledger, HoldingTimeTable(holding_ms), now_ms)));
}

py::bytes seal_json(const std::string& record_json, const std::string& key_hex) {
  const auto sealed = seal(clean_record_from_json(Json::parse(record_json)), SealKey::from_hex(key_hex));
  const auto bytes = sealed.encode();
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

std::string unseal_json(const py::bytes& blob, const std::string& key_hex) {
  const std::string raw = blob;
  const Bytes bytes(raw.begin(), raw.end());
  return to_json(unseal(SealedRecord::decode(bytes), SealKey::from_hex(key_hex))).dump();
}

std::string run_json(const std::string& config_json, const std::optional<std::string>& out_dir, bool parallel) {
  const auto config = config_from_json(Json::parse(config_json));
  ScenarioResult result;
  {
    py::gil_scoped_release release;
    result = run_scenario(config, RunOptions{parallel});
  }
  if (out_dir) {
    write_trace_set(result.traces, *out_dir);
    write_text_file(std::filesystem::path(*out_dir) / trace_paths::kReport, to_json(result.metrics).dump(2) + "\n");
  }
  return to_json(result.metrics).dump();
}

std::string score_json(const std::string& trace_dir) { return to_json(score_dir(trace_dir)).dump(); }

std::pair<bool, std::string> replay_trace(const std::string& trace_dir) {
  const auto r = replay_dir(trace_dir);
  return {r.identical, r.divergence};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "sentinel core bindings";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IntegrityFailure>(m, "IntegrityFailure");
  py::register_exception<TraceMismatch>(m, "TraceMismatch");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const nlohmann::json::exception& e) {
      py::set_error(PyExc_ValueError, e.what());
    }
  });

  m.def("validate_config", &validate, py::arg("config_json"));
  m.def("config_hash", [](const std::string& j) { return config_hash(config_from_json(Json::parse(j))); });
  m.def("assess_state", &state_name, py::arg("count"), py::arg("theta_s"), py::arg("theta_m"));
  m.def("dedupe", &dedupe_json, py::arg("records_json"));
  m.def("transition_probabilities", &probabilities, py::arg("transitions"), py::arg("from_state"),
        py::arg("alpha") = 1.0);
  m.def("react", &react_outcome, py::arg("activity"), py::arg("state"), py::arg("observed_since_ms"),
        py::arg("holding_ms"), py::arg("now_ms"));
  m.def("seal", &seal_json, py::arg("record_json"), py::arg("key_hex"));
  m.def("unseal", &unseal_json, py::arg("sealed"), py::arg("key_hex"));
  m.def("run_scenario", &run_json, py::arg("config_json"), py::arg("out_dir") = std::nullopt,
        py::arg("parallel") = false);
  m.def("score", &score_json, py::arg("trace_dir"));
  m.def("replay", &replay_trace, py::arg("trace_dir"));
}
