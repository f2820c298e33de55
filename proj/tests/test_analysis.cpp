#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <numeric>

#include "qwitness/analysis.hpp"
#include "qwitness/error.hpp"
#include "qwitness/sampler.hpp"
#include "qwitness/version.hpp"

using namespace qwitness;

TEST_CASE("histogram binning") {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i) / 999.0;
  const auto h = freedman_diaconis_histogram(v);
  CHECK(h.rule == "freedman-diaconis");
  CHECK(h.edges.size() == h.counts.size() + 1);
  CHECK(h.edges.front() == 0.0);
  CHECK(h.edges.back() == 1.0);
  CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}) == 1000);
  // IQR 0.5, n^(1/3) = 10: width 0.1 -> 10 bins.
  CHECK(h.counts.size() == 10);

  std::vector<double> spiky(100, 0.0);
  spiky.push_back(5.0);
  const auto s = freedman_diaconis_histogram(spiky);
  CHECK(s.rule == "sturges");
  CHECK(s.counts.size() == 8);
  CHECK(s.counts.back() == 1);

  const auto one = freedman_diaconis_histogram(std::vector<double>(5, 2.0));
  CHECK(one.counts == std::vector<std::size_t>{5});
  CHECK_THROWS_AS(freedman_diaconis_histogram(std::vector<double>{}), Error);
}

TEST_CASE("seeded split") {
  const auto [a, b] = split_indices(11, 3);
  CHECK(a.size() == 5);
  CHECK(b.size() == 6);
  std::vector<std::size_t> all(a);
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
  CHECK(split_indices(11, 3) == split_indices(11, 3));
  CHECK(split_indices(1000, 3).first != split_indices(1000, 4).first);
}

TEST_CASE("feasible order") {
  CHECK(highest_feasible_order(QuadratureDataset::randomized({1.0, -1.0, 1.0})) == 2);
  CHECK(highest_feasible_order(QuadratureDataset::randomized({0.0, 0.0})) == 0);
  CHECK(highest_feasible_order(QuadratureDataset::randomized({0.5, -1.5, 2.0, 0.3})) == 8);
  const auto big = sample(StateSpec::fock_mixture(0.62), 10'000, 1);
  CHECK(highest_feasible_order(big) >= 40);
  const auto tagged = sample(StateSpec::fock_mixture(0.62), 4'000, 1, PhaseMode::tagged);
  // 4000 uniform phases over pi give >= 100 per bin only for a handful of bins.
  const int t = highest_feasible_order(tagged);
  CHECK(t >= 2);
  CHECK(t <= 20);
}

TEST_CASE("analysis refuses unsupported orders") {
  const auto d = QuadratureDataset::randomized({0.5, -1.5, 2.0, 0.3, 0.7, 0.1, 1.0, 0.9});
  AnalysisConfig cfg;
  cfg.max_order = 16;
  try {
    analyze_dataset(d, cfg);
    FAIL("expected refusal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient_data);
    CHECK(std::string(e.what()).find("highest feasible order 8") != std::string::npos);
  }
  cfg.max_order = 5;
  CHECK_THROWS_AS(analyze_dataset(d, cfg), Error);
}

TEST_CASE("analysis of a simulated record") {
  const auto d = sample(StateSpec::fock_mixture(0.62), 60'000, 2);
  AnalysisConfig cfg;
  cfg.max_order = 12;
  const auto rep = analyze_dataset(d, cfg);
  CHECK(rep.train_count == 30'000);
  CHECK(rep.test_count == 30'000);
  CHECK(rep.orders.size() == 6);
  CHECK(rep.warnings.empty());
  for (const auto& o : rep.orders) {
    CAPTURE(o.order);
    REQUIRE(o.min_F);
    CHECK(o.significance);
    CHECK(o.psd);
    CHECK(o.coeffs.size() == static_cast<std::size_t>(o.order / 2));
  }
  CHECK(*rep.orders[0].min_F > 0.0);

  cfg.split = SplitMode::same;
  const auto same = analyze_dataset(d, cfg);
  CHECK(same.test_count == 60'000);
  CHECK(same.warnings.size() == 1);
  // Deterministic end to end.
  CHECK(to_json(same) == to_json(analyze_dataset(d, cfg)));

  cfg.mode = OnsetMode::exact;
  const auto ex = analyze_dataset(d, cfg);
  if (ex.onset_order) CHECK(*ex.orders[static_cast<std::size_t>(*ex.onset_order / 2 - 1)].min_F < -cfg.tol_neg);
}

TEST_CASE("vacuum record shows no onset") {
  const auto d = sample(StateSpec::fock_mixture(0.0), 100'000, 8);
  AnalysisConfig cfg;
  cfg.max_order = 16;
  cfg.split = SplitMode::same;
  const auto rep = analyze_dataset(d, cfg);
  CHECK_FALSE(rep.onset_order);
  for (const auto& o : rep.orders)
    if (o.significance) CHECK(o.significance->z_score > -5.0);
}

TEST_CASE("config JSON") {
  AnalysisConfig c;
  c.max_order = 20;
  c.mode = OnsetMode::exact;
  c.split = SplitMode::same;
  c.seed = 99;
  c.solve.equilibrate = false;
  const auto j = to_json(c);
  const auto back = config_from_json(j);
  CHECK(to_json(back) == j);
  const auto partial = config_from_json(nlohmann::json{{"z_threshold", 3.0}}, c);
  CHECK(partial.z_threshold == 3.0);
  CHECK(partial.max_order == 20);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"max_order", "many"}}), Error);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"mode", "fuzzy"}}), Error);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), Error);
}

TEST_CASE("state JSON") {
  for (const auto& s : {StateSpec::fock_mixture(0.62), StateSpec::thermal(1.0),
                        StateSpec::coherent_phase_averaged(4.0)})
    CHECK(state_from_json(to_json(s)) == s);
  CHECK_THROWS_AS(state_from_json(nlohmann::json{{"kind", "thermal"}, {"eta", 0.1}}), Error);
  CHECK_THROWS_AS(state_from_json(nlohmann::json{{"kind", "fock_mixture"}, {"eta", 1.5}}), Error);
  CHECK_THROWS_AS(state_from_json(nlohmann::json{{"kind", "squeezed"}}), Error);
}

TEST_CASE("report schema") {
  const auto d = sample(StateSpec::fock_mixture(1.0), 20'000, 4);
  AnalysisConfig cfg;
  cfg.max_order = 6;
  cfg.bootstrap = 20;
  const auto j = to_json(analyze_dataset(d, cfg));
  CHECK(j["schema"] == "qwitness.report");
  CHECK(j["schema_version"] == 1);
  CHECK(j["library_version"] == std::string(kVersion));
  CHECK(j["convention"]["vacuum_variance"] == 0.5);
  CHECK(j["seed"] == 1);
  CHECK(j["config"]["max_order"] == 6);
  CHECK(j["orders"].size() == 3);
  CHECK(j["moments"]["mu"].size() == 7);
  CHECK(j["moments"]["bootstrap_stderr"].size() == 7);
  for (const char* key : {"min_F", "z_score", "G_state", "coefficients", "diagnostics", "psd"})
    CHECK(j["orders"][1].contains(key));
  CHECK(j["orders"][1]["diagnostics"]["residual"].get<double>() < 1e-8);
  CHECK(j["onset_order"] == 4);
  CHECK(j["histogram"]["rule"] == "freedman-diaconis");
}

TEST_CASE("sweep and profile helpers") {
  const std::vector<double> etas{0.5, 0.62, 0.8, 1.0};
  const auto sw = sweep_onset(etas, 20);
  REQUIRE(sw.size() == 4);
  CHECK_FALSE(sw[0].onset);
  CHECK(sw[1].onset == 12);
  CHECK(sw[2].onset == 6);
  CHECK(sw[3].onset == 4);

  const auto mu = oracle_radial_moments(StateSpec::fock_mixture(1.0), 4);
  const std::vector<double> grid{0.0, 1.0};
  const auto p = witness_profile_table(mu, 4, grid, StateSpec::fock_mixture(1.0));
  CHECK(p[0].test_function == 1.0);
  CHECK(*p[0].wigner == doctest::Approx(-1.0 / std::numbers::pi));
  CHECK_FALSE(witness_profile_table(mu, 2, grid, std::nullopt)[1].wigner);
  CHECK_THROWS_AS(witness_profile_table(mu, 2, std::vector<double>{}, std::nullopt), Error);
}
