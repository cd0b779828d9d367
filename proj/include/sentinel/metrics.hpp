#pragma once

// Detection-quality scoring over a completed trace set. Reads only the trace
// files (config.json + JSONL streams), never in-memory simulation state.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sentinel/trace.hpp"

namespace sentinel {

struct EventCounts {
  std::size_t generated = 0;
  std::size_t cleaned = 0;   // passed cleanse (includes later clone drops)
  std::size_t deduped = 0;   // survived clone removal
  std::size_t rejected = 0;
  std::size_t sealed = 0;
  std::size_t blocked = 0;   // dropped at the blocklist
  bool operator==(const EventCounts&) const = default;
};

struct AttackMetrics {
  std::size_t index = 0;
  AttackKind kind = AttackKind::DDoS;
  TimeMs start_ms = 0;
  TimeMs end_ms = 0;
  std::vector<std::string> targets;
  std::vector<std::string> flagged;
  /// flagged / targets; null for an attack without targets.
  std::optional<double> detection_rate;
  /// One per flagged target: first harmful reaction minus attack start.
  std::vector<TimeMs> latencies_ms;
  std::size_t attack_events = 0;
  std::size_t falsified_rejected = 0;
  bool operator==(const AttackMetrics&) const = default;
};

struct MetricsReport {
  std::string config_hash;
  /// Over all (attack, target) pairs; null when no attack has targets.
  std::optional<double> detection_rate;
  /// Over devices never targeted by any attack; null when there are none.
  std::optional<double> false_positive_rate;
  std::optional<double> detection_latency_median_ms;
  std::optional<TimeMs> detection_latency_max_ms;
  /// OutOfRange-mode falsified events rejected by cleanse; null if none.
  std::optional<double> fdia_drop_rate;
  EventCounts counts;
  std::vector<AttackMetrics> attacks;
  bool operator==(const MetricsReport&) const = default;
};

/// Throws TraceMismatch when the trace headers disagree on scenario identity.
MetricsReport score(const TraceSet& traces);
MetricsReport score_dir(const std::filesystem::path& dir);

Json to_json(const MetricsReport& report);
/// One row per attack.
std::string to_csv(const MetricsReport& report);

}  // namespace sentinel
