#pragma once

// MEC-layer wiring: one GatewayPipeline (detector + reactor + sealer) per
// gateway, plus the shared control server. Used both by the live simulation
// and by trace replay so the two produce identical verdict/reaction streams.

#include <set>
#include <string>
#include <vector>

#include "sentinel/detector.hpp"
#include "sentinel/reactor.hpp"
#include "sentinel/sealing.hpp"
#include "sentinel/trace.hpp"

namespace sentinel {

class GatewayPipeline {
 public:
  GatewayPipeline(std::string gateway_id, const DetectorSettings& settings, Sealer sealer);

  const std::string& gateway_id() const { return gateway_id_; }

  /// Detector step + flowchart reaction for one accepted record.
  ReactionOutcome on_accept(const CleanRecord& record, TimeMs now_ms, const SecurityParameters& params);
  /// Elevated-verbosity trace for monitored devices whose traffic is dropped.
  void on_blocked_drop(const DeviceEvent& event, TimeMs now_ms);
  /// Timer tick: state decay plus observation expiry. Returns devices to block.
  std::vector<std::string> on_tick(TimeMs now_ms, const SecurityParameters& params);

  /// Lines / frames / control requests produced since the last take.
  struct Output {
    std::string verdict_lines;
    std::string reaction_lines;
    Bytes sealed_frames;
    std::vector<ControlMessage> control_requests;
  };
  Output take_output();

  const Detector& detector() const { return detector_; }
  const ObservationLedger& ledger() const { return ledger_; }
  const std::set<std::string>& monitored() const { return monitored_; }
  std::optional<CleanRecord> last_record(const std::string& device_id) const;

 private:
  void emit_reaction(const ReactionOutcome& outcome, TimeMs now_ms, const char* source, const CleanRecord* record);

  std::string gateway_id_;
  Detector detector_;
  ObservationLedger ledger_;
  Sealer sealer_;
  std::set<std::string> monitored_;
  std::map<std::string, CleanRecord> last_records_;
  Output out_;
};

class MecEngine {
 public:
  explicit MecEngine(const ScenarioConfig& config);

  std::size_t gateway_count() const { return pipelines_.size(); }
  std::size_t gateway_index(const std::string& gateway_id) const;
  GatewayPipeline& pipeline(std::size_t index) { return pipelines_[index]; }
  const GatewayPipeline& pipeline(std::size_t index) const { return pipelines_[index]; }

  /// Live parameters; stable between barriers.
  const SecurityParameters& params() const { return control_.live(); }
  ControlServer& control_server() { return control_; }

  /// Event boundary: flushes each gateway's output in gateway order, runs its
  /// control requests through the control server, then commits staged
  /// parameter changes.
  void barrier(TimeMs now_ms, JsonlWriter& verdicts, JsonlWriter& reactions, Bytes& sealed_store);

  /// {gateway_id: detector snapshot}
  Json detector_snapshot() const;

 private:
  std::vector<GatewayPipeline> pipelines_;
  std::map<std::string, std::size_t> index_;
  ControlServer control_;
};

/// Nonce prefix for a gateway's sealer, derived from the scenario seed.
std::array<std::uint8_t, 16> gateway_nonce_prefix(std::uint64_t seed, const std::string& gateway_id);
SealKey scenario_key(const ScenarioConfig& config);

/// Tick instants k * tick_ms, k >= 1, up to and including the last instant
/// anything can arrive.
std::vector<TimeMs> tick_schedule(const ScenarioConfig& config);

}  // namespace sentinel
