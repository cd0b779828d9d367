#include <doctest.h>

#include "fixtures.hpp"
#include "sentinel/reactor.hpp"

using namespace sentinel;
using sentinel::testing::make_event;

namespace {

Verdict verdict(const std::string& device, SecurityState s, TimeMs t) {
  Verdict v;
  v.device_id = device;
  v.timestamp_ms = t;
  v.state = s;
  v.predicted_next = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  return v;
}

CleanRecord record(ActivityCategory a, TimeMs t = 0) { return {make_event("d", 1, t, 21.5, a), {}}; }

HoldingTimeTable holding_3s() { return HoldingTimeTable(3'000); }

}  // namespace

TEST_CASE("react examples") {
  ObservationLedger ledger;
  const auto h = holding_3s();
  SUBCASE("Delete is always blocked") {
    auto o = react(record(ActivityCategory::Delete), verdict("d", SecurityState::Authentic, 0), ledger, h, 0);
    CHECK(std::holds_alternative<BlockAndRevoke>(o));
  }
  SUBCASE("Read in Suspicious is sealed") {
    auto o = react(record(ActivityCategory::Read), verdict("d", SecurityState::Suspicious, 0), ledger, h, 0);
    REQUIRE(std::holds_alternative<SealAndStore>(o));
    CHECK(std::get<SealAndStore>(o).record == record(ActivityCategory::Read));
  }
  SUBCASE("aged observation is reported malicious") {
    ledger.enter("d", {0, SecurityState::Authentic, ActivityCategory::Update});
    auto o = react(record(ActivityCategory::Update, 5'000), verdict("d", SecurityState::Authentic, 5'000), ledger, h,
                   5'000);
    REQUIRE(std::holds_alternative<ReportMalicious>(o));
    CHECK(std::get<ReportMalicious>(o).cause == MaliciousCause::HoldingTimeExceeded);
    CHECK(ledger.size() == 0);
  }
  SUBCASE("unobserved authentic read enters observation") {
    auto o = react(record(ActivityCategory::Read, 42), verdict("d", SecurityState::Authentic, 42), ledger, h, 42);
    REQUIRE(std::holds_alternative<Observe>(o));
    CHECK(std::get<Observe>(o).started_at_ms == 42);
    REQUIRE(ledger.find("d") != nullptr);
    CHECK(ledger.find("d")->entered_at_ms == 42);
  }
  SUBCASE("observation within holding time is harmless") {
    ledger.enter("d", {0, SecurityState::Authentic, ActivityCategory::Read});
    auto o = react(record(ActivityCategory::Read, 1'000), verdict("d", SecurityState::Authentic, 1'000), ledger, h,
                   1'000);
    REQUIRE(std::holds_alternative<ControlMessage>(o));
    CHECK(std::get<ControlMessage>(o).kind == ControlKind::VerifyData);
    CHECK(ledger.size() == 0);
  }
  SUBCASE("holding comparison is strict") {
    ledger.enter("d", {0, SecurityState::Authentic, ActivityCategory::Read});
    auto o = react(record(ActivityCategory::Read, 3'000), verdict("d", SecurityState::Authentic, 3'000), ledger, h,
                   3'000);
    CHECK(std::holds_alternative<ControlMessage>(o));
  }
  SUBCASE("mismatch") {
    CHECK_THROWS_AS(react(record(ActivityCategory::Read), verdict("x", SecurityState::Authentic, 0), ledger, h, 0),
                    DeviceMismatchError);
  }
}

TEST_CASE("flowchart totality over all 27 cases") {
  enum class LedgerStatus { Absent, Fresh, Expired };
  const auto h = holding_3s();
  int cases = 0;
  for (auto activity : kActivities)
    for (auto state : kStates)
      for (auto status : {LedgerStatus::Absent, LedgerStatus::Fresh, LedgerStatus::Expired}) {
        ObservationLedger ledger;
        const TimeMs now = 10'000;
        if (status == LedgerStatus::Fresh) ledger.enter("d", {now - 1'000, SecurityState::Authentic, activity});
        if (status == LedgerStatus::Expired) ledger.enter("d", {now - 5'000, SecurityState::Authentic, activity});
        const auto o = react(record(activity, now), verdict("d", state, now), ledger, h, now);
        ++cases;

        const char* expected;
        if (activity == ActivityCategory::Delete) expected = "BlockAndRevoke";
        else if (state == SecurityState::Suspicious) expected = "SealAndStore";
        else if (state == SecurityState::Malicious) expected = "ReportMalicious";
        else if (status == LedgerStatus::Absent) expected = "Observe";
        else if (status == LedgerStatus::Expired) expected = "ReportMalicious";
        else expected = "ControlMessage";
        CAPTURE(cases);
        CHECK(outcome_name(o) == expected);
        CHECK(ledger.size() <= 1);
      }
  CHECK(cases == 27);
}

TEST_CASE("ledger expiry") {
  ObservationLedger ledger;
  HoldingTimeTable h(3'000);
  h.set(SecurityState::Authentic, ActivityCategory::Update, 1'000);
  ledger.enter("a", {0, SecurityState::Authentic, ActivityCategory::Read});
  ledger.enter("b", {0, SecurityState::Authentic, ActivityCategory::Update});
  CHECK(ledger.expire(h, 1'000).empty());
  CHECK(ledger.expire(h, 1'001) == std::vector<std::string>{"b"});
  CHECK(ledger.expire(h, 3'001) == std::vector<std::string>{"a"});
  CHECK(ledger.size() == 0);
}

TEST_CASE("apply_control") {
  const SecurityParameters initial{{10, 20, 5'000}, HoldingTimeTable(3'000)};
  ControlServer server(initial, {"d"});

  SUBCASE("threshold update applies at the next boundary") {
    ControlMessage m{"d", ControlKind::UpdateSecuritySettings, Thresholds{10, 15, 5'000}, std::nullopt};
    CHECK(server.apply_control(m) == ControlAck::Staged);
    CHECK(server.live().thresholds.theta_m == 20);
    CHECK(server.commit_at_boundary());
    CHECK(server.live().thresholds.theta_m == 15);
    CHECK(assess_state(16, server.live().thresholds) == SecurityState::Malicious);
  }
  SUBCASE("invalid update is rejected and nothing changes") {
    ControlMessage m{"d", ControlKind::UpdateSecuritySettings, Thresholds{20, 20, 5'000}, std::nullopt};
    CHECK(server.apply_control(m) == ControlAck::Rejected);
    CHECK_FALSE(server.commit_at_boundary());
    CHECK(server.live() == initial);
  }
  SUBCASE("VerifyData reconfirms an in-range record") {
    const CleanRecord last{make_event("d", 3, 10), {}};
    auto ack = server.apply_control({"d", ControlKind::VerifyData, std::nullopt, std::nullopt},
                                    [&](const std::string&) { return std::optional<CleanRecord>(last); });
    CHECK(ack == ControlAck::Reconfirmed);
    CHECK_FALSE(server.has_pending());
    CHECK(server.live() == initial);
  }
  SUBCASE("unknown device") {
    CHECK_THROWS_AS(server.apply_control({"nope", ControlKind::VerifyData, std::nullopt, std::nullopt}),
                    UnknownDeviceError);
  }
}
