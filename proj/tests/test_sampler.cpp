#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "qwitness/moments.hpp"
#include "qwitness/sampler.hpp"
#include "qwitness/states.hpp"

using namespace qwitness;

TEST_CASE("Kolmogorov-Smirnov fidelity at the 1% level") {
  constexpr std::size_t n = 100'000;
  const double critical = oracle::ks_critical_1pct(n);
  for (const auto& s : {StateSpec::fock_mixture(0.62), StateSpec::thermal(1.0),
                        StateSpec::coherent_phase_averaged(2.0)}) {
    CAPTURE(to_string(s.kind()));
    const auto data = sample(s, n, 123);
    const double d = oracle::ks_statistic(s, data.values());
    CAPTURE(d);
    CHECK(d < critical);
  }
}

TEST_CASE("sampled moments match the oracle") {
  const auto mix = sample(StateSpec::fock_mixture(0.62), 1'000'000, 42);
  const auto pm = empirical_power_moments(mix, 2);
  CHECK(std::fabs(pm.mean[1] - 1.12) < 5.0 * pm.standard_error[1]);

  const auto one = sample(StateSpec::fock_mixture(1.0), 1'000'000, 43);
  const auto pm1 = empirical_power_moments(one, 4);
  CHECK(std::fabs(pm1.mean[2] - 15.0 / 4.0) < 5.0 * pm1.standard_error[2]);
}

TEST_CASE("sampler determinism and thread independence") {
  const auto s = StateSpec::coherent_phase_averaged(1.0);
  const auto a = sample(s, 70'000, 9);
  const auto b = sample(s, 70'000, 9, PhaseMode::randomized, 4);
  CHECK(std::ranges::equal(a.raw_values(), b.raw_values()));
  const auto c = sample(s, 70'000, 10);
  CHECK_FALSE(std::ranges::equal(a.raw_values(), c.raw_values()));
  // A prefix of a longer record is the shorter record.
  const auto shorter = sample(s, 20'000, 9);
  CHECK(std::ranges::equal(shorter.raw_values(), a.raw_values().first(20'000)));
}

TEST_CASE("tagged mode attaches phases in [0, pi)") {
  const auto d = sample(StateSpec::thermal(0.5), 10'000, 1, PhaseMode::tagged);
  REQUIRE(d.phase_mode() == PhaseMode::tagged);
  double lo = 10.0, hi = -1.0;
  for (double p : d.phases()) {
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  CHECK(lo >= 0.0);
  CHECK(hi < std::numbers::pi);
  CHECK(hi - lo > 3.0);
}

TEST_CASE("invalid sample count") {
  CHECK_THROWS(sample(StateSpec::thermal(1.0), 0, 1));
}
