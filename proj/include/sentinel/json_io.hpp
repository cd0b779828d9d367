#pragma once

// JSON (nlohmann) mappings for config, records, verdicts and detector state.
// Field names are the snake_case member names.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "sentinel/collector.hpp"
#include "sentinel/detector.hpp"
#include "sentinel/domain.hpp"

namespace sentinel {

using Json = nlohmann::json;

Json to_json(const Thresholds& t);
Json to_json(const HoldingTimeTable& h);
Json to_json(const ScenarioConfig& config);
Json to_json(const DeviceEvent& event);
Json to_json(const CleanRecord& record);
Json to_json(const Verdict& verdict);
Json to_json(const DeviceTracker& tracker);
Json to_json(const Detector& detector);

/// Parse errors surface as ConfigError(ParseError) carrying the field path.
ScenarioConfig config_from_json(const Json& j);
Thresholds thresholds_from_json(const Json& j, const std::string& path = "/thresholds");
HoldingTimeTable holding_times_from_json(const Json& j, const std::string& path = "/holding_times");
ScenarioConfig load_config(const std::filesystem::path& path);

/// Throws std::invalid_argument on malformed input.
DeviceEvent event_from_json(const Json& j);
CleanRecord clean_record_from_json(const Json& j);
DeviceTracker tracker_from_json(const Json& j);
Detector detector_from_json(const Json& j);

/// Canonical serialization (sorted keys, no whitespace).
std::string canonical_dump(const Json& j);
/// SHA-256 of the canonical config serialization.
std::string config_hash(const ScenarioConfig& config);

}  // namespace sentinel
