#include <doctest.h>

#include <filesystem>
#include <map>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "sentinel/cli.hpp"
#include "sentinel/replay.hpp"
#include "sentinel/simulation.hpp"

using namespace sentinel;
using sentinel::testing::make_config;

namespace {

std::vector<Json> body(const std::string& text) {
  auto lines = parse_jsonl(text);
  REQUIRE_FALSE(lines.empty());
  CHECK(lines.front().at("type") == "header");
  lines.erase(lines.begin());
  return lines;
}

ScenarioConfig ddos_config(std::uint64_t seed = 7) {
  auto c = make_config(10, 2, 0.5, seed);
  c.attacks.push_back({AttackKind::DDoS, {"dev-002", "dev-005"}, 20'000, 40'000, 20.0});
  return c;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("sentinel-test-" + name);
  std::filesystem::remove_all(p);
  return p;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "sentinel");
  std::ostringstream out;
  std::ostringstream err;
  const int rc = run_cli(args, out, err);
  if (out_text) *out_text = out.str();
  return rc;
}

}  // namespace

TEST_CASE("empty scenario produces only headers") {
  ScenarioConfig c;
  c.duration_ms = 10'000;
  c.gateways.push_back({"gw-0", {}});
  const auto r = run_scenario(c);
  CHECK(body(r.traces.events).empty());
  CHECK(body(r.traces.collector).empty());
  CHECK(body(r.traces.verdicts).empty());
  CHECK(r.traces.sealed_store.empty());
  CHECK_FALSE(r.metrics.detection_rate.has_value());
  CHECK_FALSE(r.metrics.false_positive_rate.has_value());
}

TEST_CASE("invalid config is refused before running") {
  auto c = make_config(2, 1);
  c.thresholds.theta_s = c.thresholds.theta_m;
  CHECK_THROWS_AS(run_scenario(c), ConfigError);
}

TEST_CASE("runs are deterministic and parallel matches sequential") {
  const auto c = ddos_config();
  const auto a = run_scenario(c);
  const auto b = run_scenario(c);
  const auto p = run_scenario(c, RunOptions{true});
  CHECK(a.traces == b.traces);
  CHECK(trace_hashes(a.traces) == trace_hashes(p.traces));
  CHECK(a.metrics == p.metrics);

  auto other = c;
  other.seed = 8;
  CHECK(trace_hashes(run_scenario(other).traces) != trace_hashes(a.traces));
}

TEST_CASE("events are in global order") {
  const auto r = run_scenario(ddos_config());
  const auto lines = body(r.traces.events);
  REQUIRE(lines.size() > 100);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto key = [](const Json& j) {
      return std::make_tuple(j.at("timestamp_ms").get<TimeMs>(), j.at("device_id").get<std::string>(),
                             j.at("seq_no").get<std::int64_t>());
    };
    CHECK(key(lines[i - 1]) < key(lines[i]));
  }
}

TEST_CASE("ground-truth labels never reach the pipeline") {
  const auto r = run_scenario(ddos_config());
  for (const auto* text : {&r.traces.collector, &r.traces.verdicts, &r.traces.reactions}) {
    CHECK(text->find("\"label\"") == std::string::npos);
    CHECK(text->find("ddos-flood") == std::string::npos);
    CHECK(text->find("attack_index") == std::string::npos);
  }
}

TEST_CASE("a single benign device is never escalated") {
  // Window counts are Poisson(5); with theta_s = 25 the chance of any
  // escalation over the run is bounded by events * P(X > 25).
  auto c = make_config(1, 1, 0.5);
  c.thresholds = {25, 40, 10'000};
  const double bound = 60.0 * oracle::poisson_upper_tail(5.0, 25);
  REQUIRE(bound < 1e-6);

  const auto r = run_scenario(c);
  for (const auto& v : body(r.traces.verdicts)) CHECK(v.at("state") == "authentic");
  for (const auto& line : body(r.traces.reactions)) {
    if (line.at("type") != "reaction") continue;
    CHECK(line.at("outcome") != "ReportMalicious");
    CHECK(line.at("outcome") != "BlockAndRevoke");
  }
  CHECK(r.metrics.false_positive_rate == 0.0);
}

TEST_CASE("blocked devices stay blocked") {
  const auto r = run_scenario(ddos_config());
  std::map<std::string, TimeMs> blocked_at;
  for (const auto& line : body(r.traces.reactions))
    if (line.at("type") == "reaction" &&
        (line.at("outcome") == "ReportMalicious" || line.at("outcome") == "BlockAndRevoke")) {
      const auto d = line.at("device_id").get<std::string>();
      if (!blocked_at.contains(d)) blocked_at[d] = line.at("t").get<TimeMs>();
    }
  REQUIRE(blocked_at.contains("dev-002"));
  for (const auto& line : body(r.traces.collector)) {
    const auto d = line.at("device_id").get<std::string>();
    const auto it = blocked_at.find(d);
    if (it == blocked_at.end() || line.at("t").get<TimeMs>() <= it->second) continue;
    CHECK(line.at("decision") != "accept");
  }
}

TEST_CASE("DDoS targets are flagged, bystanders are not") {
  const auto r = run_scenario(ddos_config());
  CHECK(r.metrics.detection_rate == 1.0);
  CHECK(r.metrics.false_positive_rate == 0.0);
  REQUIRE(r.metrics.attacks.size() == 1);
  for (auto l : r.metrics.attacks[0].latencies_ms) {
    CHECK(l >= 0);
    CHECK(l <= 20'000);
  }
}

TEST_CASE("replay reproduces the run") {
  const auto r = run_scenario(ddos_config());
  const auto rep = replay(r.traces);
  CHECK(rep.identical);
  CHECK(rep.divergence.empty());
  CHECK(rep.sealed_store.size() == r.traces.sealed_store.size());

  auto tampered = r.traces;
  const auto pos = tampered.verdicts.rfind("\"state\":\"");
  REQUIRE(pos != std::string::npos);
  tampered.verdicts.insert(pos, "\"x\":1,");
  CHECK_FALSE(replay(tampered).identical);
}

TEST_CASE("mismatched traces are refused") {
  const auto a = run_scenario(ddos_config(7));
  const auto b = run_scenario(ddos_config(9));
  auto mixed = a.traces;
  mixed.verdicts = b.traces.verdicts;
  CHECK_THROWS_AS(score(mixed), TraceMismatch);
  CHECK_THROWS_AS(replay(mixed), TraceMismatch);
}

TEST_CASE("trace set survives a disk round trip") {
  const auto r = run_scenario(ddos_config());
  const auto dir = temp_dir("roundtrip");
  write_trace_set(r.traces, dir);
  CHECK(read_trace_set(dir) == r.traces);
  CHECK(score_dir(dir) == r.metrics);
  std::filesystem::remove_all(dir);
}

TEST_CASE("scoring without attacks") {
  const auto r = run_scenario(make_config(4, 2));
  CHECK_FALSE(r.metrics.detection_rate.has_value());
  CHECK_FALSE(r.metrics.fdia_drop_rate.has_value());
  CHECK(r.metrics.false_positive_rate == 0.0);
  CHECK(r.metrics.counts.generated == body(r.traces.events).size());
  CHECK(r.metrics.counts.generated ==
        r.metrics.counts.cleaned + r.metrics.counts.rejected + r.metrics.counts.blocked);
}

TEST_CASE("cli exit codes") {
  const auto dir = temp_dir("cli");
  std::filesystem::create_directories(dir);
  const auto config_path = (dir / "config.in.json").string();
  write_text_file(config_path, to_json(ddos_config()).dump(2));

  CHECK(cli({"validate", "--config", config_path}) == kExitOk);
  CHECK(cli({"run", "--config", config_path, "--out", (dir / "a").string()}) == kExitOk);
  CHECK(cli({"run", "--config", config_path, "--out", (dir / "b").string(), "--parallel"}) == kExitOk);
  CHECK(read_trace_set(dir / "a") == read_trace_set(dir / "b"));
  CHECK(cli({"replay", "--trace", (dir / "a").string()}) == kExitOk);
  std::string csv;
  CHECK(cli({"report", "--trace", (dir / "a").string(), "--format", "csv"}, &csv) == kExitOk);
  CHECK(csv.find("ddos") != std::string::npos);

  CHECK(cli({"run", "--config", config_path, "--out", (dir / "c").string(), "--seed", "99"}) == kExitOk);
  CHECK(read_trace_set(dir / "c").events != read_trace_set(dir / "a").events);

  auto bad = ddos_config();
  bad.devices[0].activity_mix = {0.5, 0.5, 0.5};
  write_text_file(dir / "bad.json", to_json(bad).dump());
  CHECK(cli({"validate", "--config", (dir / "bad.json").string()}) == kExitValidation);
  write_text_file(dir / "garbage.json", "{not json");
  CHECK(cli({"validate", "--config", (dir / "garbage.json").string()}) == kExitValidation);
  CHECK(cli({"validate", "--config", (dir / "missing.json").string()}) == kExitIo);
  CHECK(cli({"replay", "--trace", (dir / "nowhere").string()}) == kExitIo);

  // verdicts from another scenario
  write_text_file(dir / "c" / trace_paths::kVerdicts, read_text_file(dir / "a" / trace_paths::kVerdicts));
  CHECK(cli({"replay", "--trace", (dir / "c").string()}) == kExitReplayDivergence);
  std::filesystem::remove_all(dir);
}
