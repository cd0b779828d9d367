#pragma once

// Deterministic discrete-event run of a scenario: devices -> gateways
// (collector) -> MEC (detector, reactor, control server) -> cloud sink.

#include <vector>

#include "sentinel/metrics.hpp"
#include "sentinel/traffic.hpp"

namespace sentinel {

struct RunOptions {
  /// Run gateway pipelines concurrently between per-timestamp barriers.
  /// Output is bit-identical to the sequential mode.
  bool parallel = false;
};

struct ScenarioResult {
  std::string config_hash;
  TraceSet traces;
  MetricsReport metrics;
};

/// All device streams with attacks applied, in global
/// (timestamp, device_id, seq_no) order.
std::vector<LabeledEvent> build_event_stream(const ScenarioConfig& config);

/// Validates first; ConfigError propagates.
ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

}  // namespace sentinel
