#pragma once

// Trace persistence. Every JSONL trace starts with a header object carrying
// {config_hash, seed, schema_version}; the remaining lines are one decision
// each.

#include <filesystem>
#include <string>
#include <vector>

#include "sentinel/json_io.hpp"
#include "sentinel/sealing.hpp"

namespace sentinel {

inline constexpr int kTraceSchemaVersion = 1;

namespace trace_paths {
inline constexpr const char* kConfig = "config.json";
inline constexpr const char* kEvents = "trace/events.jsonl";
inline constexpr const char* kCollector = "trace/collector.jsonl";
inline constexpr const char* kVerdicts = "trace/verdicts.jsonl";
inline constexpr const char* kReactions = "trace/reactions.jsonl";
inline constexpr const char* kSealedStore = "cloud/sealed-store.bin";
inline constexpr const char* kBlocklist = "state/blocklist.json";
inline constexpr const char* kDetectorSnapshot = "state/detector-snapshot.json";
inline constexpr const char* kReport = "report.json";
}  // namespace trace_paths

class TraceMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Append-only JSONL text buffer.
class JsonlWriter {
 public:
  JsonlWriter() = default;
  JsonlWriter(const std::string& config_hash, std::uint64_t seed, std::string_view stream);

  void write(const Json& line);
  void append_raw(const std::string& lines) { text_ += lines; }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

/// Everything one run produces.
struct TraceSet {
  std::string config;
  std::string events;
  std::string collector;
  std::string verdicts;
  std::string reactions;
  Bytes sealed_store;
  std::string blocklist;
  std::string detector_snapshot;

  bool operator==(const TraceSet&) const = default;
};

/// Throws std::ios_base::failure on I/O errors.
void write_trace_set(const TraceSet& traces, const std::filesystem::path& dir);
TraceSet read_trace_set(const std::filesystem::path& dir);

/// Parses JSONL text; the first element is the header.
std::vector<Json> parse_jsonl(const std::string& text);

/// Per-file SHA-256, keyed by relative path.
std::map<std::string, std::string> trace_hashes(const TraceSet& traces);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace sentinel
