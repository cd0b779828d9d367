#pragma once

#include <filesystem>
#include <string>

#include "sentinel/trace.hpp"

namespace sentinel {

struct ReplayResult {
  bool identical = false;
  /// Human-readable location of the first divergence, empty when identical.
  std::string divergence;
  std::string verdicts;
  std::string reactions;
  Bytes sealed_store;
};

/// Re-folds the recorded collector decisions through fresh detector/reactor
/// pipelines and compares the regenerated verdict and reaction traces
/// byte-for-byte with the recorded ones. Throws TraceMismatch on traces from
/// different scenarios.
ReplayResult replay(const TraceSet& traces);
ReplayResult replay_dir(const std::filesystem::path& dir);

}  // namespace sentinel
