#pragma once

#include <string>
#include <vector>

#include "sentinel/domain.hpp"

namespace sentinel::testing {

inline DeviceEvent make_event(std::string device, std::int64_t seq, TimeMs ts, double value = 21.5,
                              ActivityCategory activity = ActivityCategory::Read) {
  DeviceEvent e;
  e.device_id = std::move(device);
  e.gateway_id = "gw-0";
  e.seq_no = seq;
  e.timestamp_ms = ts;
  e.activity = activity;
  e.payload_value = value;
  e.payload_range = {0.0, 50.0};
  return e;
}

/// n devices at rate lambda, split round-robin over g gateways.
inline ScenarioConfig make_config(std::size_t devices, std::size_t gateways, double rate_per_s = 0.5,
                                  std::uint64_t seed = 7) {
  ScenarioConfig c;
  c.seed = seed;
  c.duration_ms = 60'000;
  c.thresholds = {15, 25, 10'000};
  c.holding_times = HoldingTimeTable(60'000);
  for (std::size_t g = 0; g < gateways; ++g) c.gateways.push_back({"gw-" + std::to_string(g), {}});
  for (std::size_t i = 0; i < devices; ++i) {
    const auto id = "dev-" + std::string(i < 10 ? "00" : i < 100 ? "0" : "") + std::to_string(i);
    c.devices.push_back({id, {0.0, 50.0}, rate_per_s, {0.7, 0.3, 0.0}});
    c.gateways[i % gateways].devices.push_back(id);
  }
  return c;
}

}  // namespace sentinel::testing
