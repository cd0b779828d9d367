#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sentinel/traffic.hpp"

using namespace sentinel;

namespace {

DeviceProfile profile(std::string id, double rate, std::array<double, 3> mix = {0.7, 0.3, 0.0}) {
  return {std::move(id), {0.0, 50.0}, rate, mix};
}

std::size_t count_label(const std::vector<LabeledEvent>& s, GroundTruth g) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [&](const auto& e) { return e.label == g; }));
}

}  // namespace

TEST_CASE("Poisson counts stay near the mean") {
  // lambda = 1/s over 100 s: mean 100, sd 10. A correct generator still lands
  // outside +-3 sd in about 0.27% of runs, so over 100 runs a few outliers are
  // allowed (P(more than 3) < 3e-4) while the sample mean and variance must
  // match the Poisson moments.
  const int runs = 100;
  int outside = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t seed = 0; seed < runs; ++seed) {
    const auto n = static_cast<double>(gen_traffic(profile("d", 1.0), seed, 100'000).size());
    if (std::abs(n - 100.0) > 30.0) ++outside;
    sum += n;
    sum_sq += n * n;
  }
  const double mean = sum / runs;
  const double var = (sum_sq - runs * mean * mean) / (runs - 1);
  CHECK(outside <= 3);
  CHECK(std::abs(mean - 100.0) <= 3.0);  // 3 sd of the sample mean
  // (runs-1) s^2 / sigma^2 ~ chi2(99); 0.1% / 99.9% quantiles are 61.1 / 148.2
  CHECK(var * (runs - 1) / 100.0 >= 61.1);
  CHECK(var * (runs - 1) / 100.0 <= 148.2);
}

TEST_CASE("generated events are well formed") {
  const auto s = gen_traffic(profile("d", 2.0), 11, 50'000, "gw-x");
  REQUIRE_FALSE(s.empty());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& e = s[i].event;
    CHECK(e.device_id == "d");
    CHECK(e.gateway_id == "gw-x");
    CHECK(e.seq_no == static_cast<std::int64_t>(i));
    CHECK(e.timestamp_ms >= 0);
    CHECK(e.timestamp_ms < 50'000);
    CHECK(e.payload_range.contains(e.payload_value));
    CHECK(s[i].label == GroundTruth::Benign);
    if (i > 0) CHECK(e.timestamp_ms >= s[i - 1].event.timestamp_ms);
  }
}

TEST_CASE("same seed same stream") {
  CHECK(gen_traffic(profile("d", 1.0), 5, 60'000) == gen_traffic(profile("d", 1.0), 5, 60'000));
  CHECK(gen_traffic(profile("d", 1.0), 5, 60'000) != gen_traffic(profile("d", 1.0), 6, 60'000));
}

TEST_CASE("activity mix") {
  for (const auto& e : gen_traffic(profile("d", 5.0, {1.0, 0.0, 0.0}), 1, 60'000))
    CHECK(e.event.activity == ActivityCategory::Read);
  const auto s = gen_traffic(profile("d", 20.0, {0.5, 0.25, 0.25}), 1, 100'000);
  std::array<double, 3> freq{};
  for (const auto& e : s) freq[static_cast<std::size_t>(e.event.activity)] += 1.0 / static_cast<double>(s.size());
  CHECK(freq[0] == doctest::Approx(0.5).epsilon(0.05));
  CHECK(freq[2] == doctest::Approx(0.25).epsilon(0.1));
}

TEST_CASE("zero duration or rate gives nothing") {
  CHECK(gen_traffic(profile("d", 1.0), 1, 0).empty());
  CHECK(gen_traffic(profile("d", 0.0), 1, 60'000).empty());
}

TEST_CASE("DDoS multiplies target rate inside the interval") {
  // lambda = 1/s, x10 for 10 s: about 90 extra events, sd sqrt(90).
  const std::map<std::string, DeviceProfile> profiles{{"t", profile("t", 1.0)}, {"n", profile("n", 1.0)}};
  AttackSpec spec{AttackKind::DDoS, {"t"}, 20'000, 30'000, 10.0};
  double total = 0;
  const int runs = 50;
  for (int seed = 0; seed < runs; ++seed) {
    auto base = gen_traffic(profiles.at("t"), static_cast<std::uint64_t>(seed), 60'000);
    auto other = gen_traffic(profiles.at("n"), static_cast<std::uint64_t>(seed) + 1000, 60'000);
    base.insert(base.end(), other.begin(), other.end());
    std::sort(base.begin(), base.end(), event_order);
    const auto out = inject_ddos(base, spec, profiles, static_cast<std::uint64_t>(seed));
    const auto flood = count_label(out, GroundTruth::DdosFlood);
    CHECK(std::abs(static_cast<double>(flood) - 90.0) <= 3.0 * std::sqrt(90.0) + 1.0);
    total += static_cast<double>(flood);
    for (const auto& e : out) {
      if (e.label != GroundTruth::DdosFlood) continue;
      CHECK(e.event.device_id == "t");
      CHECK(e.event.timestamp_ms >= 20'000);
      CHECK(e.event.timestamp_ms < 30'000);
      CHECK(e.event.seq_no >= kFloodSeqBase);
    }
    // original events are untouched and still present
    for (const auto& e : base) CHECK(std::find(out.begin(), out.end(), e) != out.end());
    CHECK(std::is_sorted(out.begin(), out.end(), event_order));
  }
  CHECK(total / runs == doctest::Approx(90.0).epsilon(0.1));
}

TEST_CASE("DDoS intensity 1 is the identity") {
  const std::map<std::string, DeviceProfile> profiles{{"t", profile("t", 1.0)}};
  const auto base = gen_traffic(profiles.at("t"), 3, 60'000);
  CHECK(inject_ddos(base, {AttackKind::DDoS, {"t"}, 0, 60'000, 1.0}, profiles, 3) == base);
}

TEST_CASE("FDIA falsification probability") {
  const auto base = gen_traffic(profile("t", 20.0), 4, 100'000);
  REQUIRE(base.size() > 1000);
  AttackSpec spec{AttackKind::FDIA, {"t"}, 0, 100'000, 1.0, FalsifyMode::OutOfRange, 10.0};

  SUBCASE("p = 1, out of range") {
    const auto out = inject_fdia(base, spec, 4);
    REQUIRE(out.size() == base.size());
    for (const auto& e : out) {
      CHECK(e.label == GroundTruth::FdiaFalsified);
      CHECK_FALSE(e.event.payload_range.contains(e.event.payload_value));
    }
  }
  SUBCASE("p = 0") {
    spec.intensity = 0.0;
    CHECK(inject_fdia(base, spec, 4) == base);
  }
  SUBCASE("p = 0.5 within 3 sigma") {
    spec.intensity = 0.5;
    const auto out = inject_fdia(base, spec, 4);
    const double n = static_cast<double>(base.size());
    const double k = static_cast<double>(count_label(out, GroundTruth::FdiaFalsified));
    CHECK(std::abs(k - n / 2) <= 3.0 * std::sqrt(n * 0.25));
  }
  SUBCASE("in-range bias stays in range") {
    spec.falsify_mode = FalsifyMode::InRangeBias;
    for (const auto& e : inject_fdia(base, spec, 4)) CHECK(e.event.payload_range.contains(e.event.payload_value));
  }
  SUBCASE("outside the interval nothing changes") {
    spec.start_ms = 200'000;
    spec.end_ms = 300'000;
    CHECK(inject_fdia(base, spec, 4) == base);
  }
}

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
  CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
}
