#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qwitness/error.hpp"
#include "qwitness/moments.hpp"
#include "qwitness/sampler.hpp"
#include "qwitness/states.hpp"

using namespace qwitness;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a qwitness::Error");
  return ErrorKind::io_error;
}

}  // namespace

TEST_CASE("angular coefficient A_2N") {
  CHECK(angular_coefficient(1) == Rational{1, 1});
  CHECK(angular_coefficient(2) == Rational{2, 3});
  CHECK(angular_coefficient(3) == Rational{8, 15});
  CHECK(kind_of([] { angular_coefficient(0); }) == ErrorKind::invalid_argument);
  CHECK(kind_of([] { angular_coefficient(-2); }) == ErrorKind::invalid_argument);
}

TEST_CASE("A_2N * 2N equals B_2N exactly up to N = 30") {
  for (int n = 1; n <= 30; ++n) {
    CAPTURE(n);
    CHECK(angular_coefficient(n) * Rational{static_cast<std::uint64_t>(2 * n), 1} ==
          radial_factor_exact(n));
  }
}

TEST_CASE("empirical power moments of a constant-magnitude record") {
  const auto data = QuadratureDataset::randomized({1.0, -1.0, 1.0, -1.0});
  const auto pm = empirical_power_moments(data, 4);
  REQUIRE(pm.max_k() == 2);
  CHECK(pm.mean[1] == 1.0);
  CHECK(pm.mean[2] == 1.0);
  CHECK(pm.standard_error[1] == 0.0);
  CHECK(pm.standard_error[2] == 0.0);
}

TEST_CASE("empirical power moments of the vacuum") {
  const auto data = sample(StateSpec::fock_mixture(0.0), 1'000'000, 2024);
  const auto pm = empirical_power_moments(data, 4);
  CHECK(std::fabs(pm.mean[1] - 0.5) < 5.0 * pm.standard_error[1]);
  CHECK(std::fabs(pm.mean[2] - 0.75) < 5.0 * pm.standard_error[2]);
  // Covariance diagonal agrees with the squared standard errors.
  CHECK(pm.covariance(2, 2) == doctest::Approx(pm.standard_error[2] * pm.standard_error[2]));
}

TEST_CASE("empirical power moments need two samples and an even power") {
  const auto one = QuadratureDataset::randomized({0.3});
  CHECK(kind_of([&] { empirical_power_moments(one, 2); }) == ErrorKind::insufficient_data);
  const auto two = QuadratureDataset::randomized({0.3, 0.4});
  CHECK(kind_of([&] { empirical_power_moments(two, 3); }) == ErrorKind::invalid_argument);
}

TEST_CASE("moment accumulation is reproducible across thread counts and chunkings") {
  const auto data = sample(StateSpec::fock_mixture(0.62), 100'000, 7);
  MomentOptions one{4096, 1}, many{4096, 4};
  const auto a = empirical_power_moments(data, 24, one);
  const auto b = empirical_power_moments(data, 24, many);
  CHECK(a.mean == b.mean);
  CHECK(a.standard_error == b.standard_error);
  CHECK(a.covariance == b.covariance);
  const auto c = empirical_power_moments(data, 24, MomentOptions{1000, 1});
  for (int k = 1; k <= 12; ++k) {
    CAPTURE(k);
    CHECK(std::fabs(c.mean[k] - a.mean[k]) <= 1e-12 * a.mean[k]);
  }
}

TEST_CASE("symmetric conversion") {
  SUBCASE("vacuum values") {
    const auto m = radial_moments_symmetric({{1, 0.5}, {2, 0.75}}, 2);
    CHECK(m.mu(1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.mu(2) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(m.source() == MomentSource::oracle);
  }
  SUBCASE("point mass at the origin") {
    const auto m = radial_moments_symmetric({{1, 0.0}, {2, 0.0}, {3, 0.0}}, 3);
    CHECK(m.mu(0) == 1.0);
    for (int k = 1; k <= 3; ++k) CHECK(m.mu(k) == 0.0);
  }
  SUBCASE("missing moment") {
    CHECK(kind_of([] { radial_moments_symmetric({{1, 0.5}, {3, 1.0}}, 3); }) ==
          ErrorKind::incomplete_input);
  }
  SUBCASE("errors scale with the same factors") {
    const auto data = sample(StateSpec::thermal(1.0), 20'000, 3);
    const auto pm = empirical_power_moments(data, 6);
    const auto m = radial_moments_symmetric(pm);
    REQUIRE(m.standard_errors());
    REQUIRE(m.covariance());
    for (int k = 1; k <= 3; ++k) {
      CHECK((*m.standard_errors())[k] ==
            doctest::Approx(radial_factor(k) * pm.standard_error[k]).epsilon(1e-14));
      CHECK((*m.covariance())(k, k) == doctest::Approx(std::pow((*m.standard_errors())[k], 2)).epsilon(1e-9));
    }
  }
}

TEST_CASE("symmetric radial moments are strictly positive when a sample is non-zero") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> g(0.0, 2.0);
  std::uniform_int_distribution<int> len(2, 40);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(static_cast<std::size_t>(len(gen)), 0.0);
    v[static_cast<std::size_t>(trial) % v.size()] = g(gen);
    if (v[static_cast<std::size_t>(trial) % v.size()] == 0.0) continue;
    const auto m = radial_moments_symmetric(
        empirical_power_moments(QuadratureDataset::randomized(v), 12));
    for (int k = 1; k <= 6; ++k) CHECK(m.mu(k) > 0.0);
  }
}

TEST_CASE("radial moment set invariants") {
  CHECK_THROWS_AS(RadialMomentSet({0.9, 1.0}, MomentSource::oracle), Error);
  CHECK_THROWS_AS(RadialMomentSet({1.0, -1.0}, MomentSource::oracle), Error);
  Eigen::MatrixXd bad(2, 2);
  bad << 0, 0, 0, -1;
  CHECK_THROWS_AS(RadialMomentSet({1.0, 2.0}, MomentSource::empirical, std::nullopt, bad), Error);
  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 0, 1;
  CHECK_THROWS_AS(RadialMomentSet({1.0, 2.0}, MomentSource::empirical, std::nullopt, asym), Error);
  const RadialMomentSet ok({1.0, 2.0, 6.0}, MomentSource::oracle);
  CHECK(ok.max_order() == 4);
  CHECK(kind_of([&] { ok.mu(3); }) == ErrorKind::incomplete_input);
}

TEST_CASE("oracle radial moments are log-convex for classical states") {
  for (const auto& s : {StateSpec::fock_mixture(0.0), StateSpec::thermal(0.5),
                        StateSpec::thermal(1.0), StateSpec::thermal(5.0)}) {
    const auto m = oracle_radial_moments(s, 11);
    for (int k = 1; k <= 10; ++k) {
      CAPTURE(k);
      CHECK(m.mu(k + 1) * m.mu(k - 1) >= m.mu(k) * m.mu(k));
    }
  }
}

TEST_CASE("angular conversion") {
  SUBCASE("N = 1 with bins at 0 and pi/2 sums the two second moments") {
    std::vector<double> v, ph;
    for (int i = 0; i < 200; ++i) {
      v.push_back(0.1 * (i % 7) - 0.3);
      ph.push_back(0.0);
      v.push_back(0.2 * (i % 5) + 0.1);
      ph.push_back(std::numbers::pi / 2);
    }
    double sx = 0, sp = 0;
    for (std::size_t i = 0; i < v.size(); i += 2) {
      sx += v[i] * v[i];
      sp += v[i + 1] * v[i + 1];
    }
    const auto est = radial_moments_angular(QuadratureDataset::tagged(v, ph), 1);
    CHECK(est.value == doctest::Approx(sx / 200 + sp / 200).epsilon(1e-13));
  }
  SUBCASE("all phases zero leaves the other bins empty") {
    std::vector<double> v(500, 0.3), ph(500, 0.0);
    const auto data = QuadratureDataset::tagged(v, ph);
    for (int n : {1, 2, 3}) {
      try {
        radial_moments_angular(data, n);
        FAIL("expected angular coverage error");
      } catch (const AngularCoverageError& e) {
        CHECK(e.kind() == ErrorKind::insufficient_angular_coverage);
        CHECK(e.deficient_bins().size() == static_cast<std::size_t>(2 * n - 1));
      }
    }
  }
  SUBCASE("rotationally invariant tagged data agrees with the symmetric path") {
    const auto tagged = sample(StateSpec::fock_mixture(0.62), 400'000, 99, PhaseMode::tagged);
    const auto plain = QuadratureDataset::randomized(tagged.values());
    const auto sym = radial_moments_symmetric(empirical_power_moments(plain, 8));
    for (int n = 1; n <= 4; ++n) {
      CAPTURE(n);
      const auto est = radial_moments_angular(tagged, n);
      const double combined = std::hypot(est.standard_error, (*sym.standard_errors())[n]);
      CHECK(std::fabs(est.value - sym.mu(n)) < 5.0 * combined);
    }
  }
  SUBCASE("randomized data is rejected") {
    CHECK_THROWS_AS(radial_moments_angular(QuadratureDataset::randomized({1.0, 2.0}), 1), Error);
  }
}

TEST_CASE("estimate_radial_moments dispatches on the phase mode") {
  const auto tagged = sample(StateSpec::fock_mixture(0.5), 50'000, 5, PhaseMode::tagged);
  const auto m = estimate_radial_moments(tagged, 3);
  CHECK(m.max_k() == 3);
  CHECK(m.source() == MomentSource::empirical);
  CHECK_FALSE(m.covariance().has_value());
  CHECK(m.mu(1) == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("bootstrap standard errors agree with the delta method") {
  const auto data = sample(StateSpec::fock_mixture(0.62), 20'000, 17);
  const auto delta = radial_moments_symmetric(empirical_power_moments(data, 6));
  const auto boot = bootstrap_radial_stderr(data, 3, 400, 4);
  for (int k = 1; k <= 3; ++k) {
    CAPTURE(k);
    CHECK(boot[k] == doctest::Approx((*delta.standard_errors())[k]).epsilon(0.2));
  }
  CHECK(bootstrap_radial_stderr(data, 3, 50, 4) == bootstrap_radial_stderr(data, 3, 50, 4));
}

TEST_CASE("identical data and options give bit-identical moment sets") {
  const auto d1 = sample(StateSpec::thermal(0.3), 30'000, 8);
  const auto d2 = sample(StateSpec::thermal(0.3), 30'000, 8);
  const auto a = estimate_radial_moments(d1, 8);
  const auto b = estimate_radial_moments(d2, 8);
  CHECK(a.values() == b.values());
  CHECK(*a.standard_errors() == *b.standard_errors());
  CHECK(*a.covariance() == *b.covariance());
}

TEST_CASE("convention variance rescales imported data") {
  // Same physical record expressed with vacuum variance 1 instead of 1/2.
  const auto base = sample(StateSpec::fock_mixture(0.3), 10'000, 12);
  std::vector<double> scaled;
  for (double v : base.raw_values()) scaled.push_back(v * std::sqrt(2.0));
  const auto other = QuadratureDataset::randomized(scaled, 1.0);
  const auto a = estimate_radial_moments(base, 4);
  const auto b = estimate_radial_moments(other, 4);
  for (int k = 1; k <= 4; ++k) CHECK(b.mu(k) == doctest::Approx(a.mu(k)).epsilon(1e-12));
}
