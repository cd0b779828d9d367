#include "sentinel/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "sentinel/json_io.hpp"
#include "sentinel/metrics.hpp"
#include "sentinel/replay.hpp"
#include "sentinel/simulation.hpp"

namespace sentinel {

namespace {

std::string default_out_dir() {
  if (const char* env = std::getenv("SENTINEL_TRACE_DIR"); env && *env) return env;
  return "sentinel-out";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"sentinel: 5G IoT intrusion detection pipeline and scenario simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = default_out_dir();
  std::optional<std::uint64_t> seed;
  bool parallel = false;
  auto* run = app.add_subcommand("run", "Run a scenario and score it");
  run->add_option("--config", config_path, "Scenario config JSON")->required();
  run->add_option("--out", out_dir, "Output directory (default $SENTINEL_TRACE_DIR or ./sentinel-out)");
  run->add_option("--seed", seed, "Override the config seed");
  run->add_flag("--parallel", parallel, "Run gateway pipelines concurrently");

  std::string trace_dir;
  auto* replay_cmd = app.add_subcommand("replay", "Re-fold a recorded trace and check it reproduces");
  replay_cmd->add_option("--trace", trace_dir, "Trace directory")->required();

  std::string format = "json";
  auto* report = app.add_subcommand("report", "Score a recorded trace");
  report->add_option("--trace", trace_dir, "Trace directory")->required();
  report->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* validate = app.add_subcommand("validate", "Validate a scenario config");
  validate->add_option("--config", config_path, "Scenario config JSON")->required();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*validate) {
      validate_config(load_config(config_path));
      out << "ok " << config_path << "\n";
      return kExitOk;
    }
    if (*run) {
      auto config = load_config(config_path);
      if (seed) config.seed = *seed;
      const auto result = run_scenario(config, RunOptions{parallel});
      write_trace_set(result.traces, out_dir);
      const auto report_text = to_json(result.metrics).dump(2) + "\n";
      write_text_file(std::filesystem::path(out_dir) / trace_paths::kReport, report_text);
      Json summary = {{"out", out_dir}, {"config_hash", result.config_hash}, {"trace_hashes", trace_hashes(result.traces)}};
      out << summary.dump(2) << "\n" << report_text;
      return kExitOk;
    }
    if (*replay_cmd) {
      const auto result = replay_dir(trace_dir);
      if (!result.identical) {
        err << "replay diverged: " << result.divergence << "\n";
        return kExitReplayDivergence;
      }
      out << "replay identical: " << trace_dir << "\n";
      return kExitOk;
    }
    if (*report) {
      const auto metrics = score_dir(trace_dir);
      if (format == "csv") {
        out << to_csv(metrics);
      } else {
        out << to_json(metrics).dump(2) << "\n";
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << "\n";
    return kExitValidation;
  } catch (const TraceMismatch& e) {
    err << "trace mismatch: " << e.what() << "\n";
    return kExitReplayDivergence;
  } catch (const std::ios_base::failure& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace sentinel
