#include "qwitness/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qwitness/error.hpp"
#include "qwitness/rng.hpp"
#include "qwitness/version.hpp"

namespace qwitness {

std::string_view to_string(OnsetMode m) noexcept {
  return m == OnsetMode::exact ? "exact" : "statistical";
}

std::string_view to_string(SplitMode m) noexcept { return m == SplitMode::same ? "same" : "half"; }

OnsetMode onset_mode_from_string(std::string_view s) {
  if (s == "exact") return OnsetMode::exact;
  if (s == "statistical") return OnsetMode::statistical;
  fail(ErrorKind::invalid_argument, "unknown onset mode '" + std::string(s) + "'");
}

SplitMode split_mode_from_string(std::string_view s) {
  if (s == "same") return SplitMode::same;
  if (s == "half") return SplitMode::half;
  fail(ErrorKind::invalid_argument, "unknown split mode '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------

namespace {

// Substream reserved for the train/test permutation.
constexpr std::uint64_t kSplitStream = 0x5b117ULL;

double quantile_sorted(const std::vector<double>& v, double p) {
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

int highest_feasible_order(const QuadratureDataset& data, std::size_t min_bin_count) {
  if (data.size() < 2) return 0;
  std::vector<double> mags;
  mags.reserve(data.size());
  double biggest = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double a = std::fabs(data.value(i));
    if (a > 0.0) mags.push_back(a);
    biggest = std::max(biggest, a);
  }
  std::sort(mags.begin(), mags.end());
  const auto distinct = static_cast<long>(std::unique(mags.begin(), mags.end()) - mags.begin());
  long limit = 2 * distinct;
  if (biggest > 1.0) {
    // x^{2N} must stay finite for the largest sample, with headroom for n terms.
    const double headroom = std::log(std::numeric_limits<double>::max() /
                                     static_cast<double>(data.size()));
    limit = std::min(limit, static_cast<long>(headroom / (2.0 * std::log(biggest))));
  }
  limit = std::min<long>(limit, 60);
  limit -= limit % 2;
  if (data.phase_mode() == PhaseMode::tagged) {
    int covered = 0;
    for (int k = 1; k <= limit; ++k) {
      try {
        (void)radial_moments_angular(data, k, min_bin_count);
        covered = k;
      } catch (const AngularCoverageError&) {
        break;
      }
    }
    limit = std::min<long>(limit, covered - covered % 2);
  }
  return static_cast<int>(limit);
}

Histogram freedman_diaconis_histogram(std::span<const double> values) {
  require(!values.empty(), "histogram of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  Histogram h;
  const double lo = v.front(), hi = v.back();
  const double iqr = quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25);
  const auto n = static_cast<double>(v.size());
  std::size_t bins = 1;
  if (hi > lo) {
    if (iqr > 0.0) {
      h.rule = "freedman-diaconis";
      h.bin_width = 2.0 * iqr / std::cbrt(n);
      bins = static_cast<std::size_t>(std::ceil((hi - lo) / h.bin_width));
      bins = std::clamp<std::size_t>(bins, 1, 100000);
    } else {
      h.rule = "sturges";
      bins = static_cast<std::size_t>(std::ceil(std::log2(n))) + 1;
    }
    h.bin_width = (hi - lo) / static_cast<double>(bins);
  } else {
    h.rule = "single";
    h.bin_width = 0.0;
  }
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    h.edges[i] = lo + h.bin_width * static_cast<double>(i);
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  for (double x : v) {
    std::size_t b = h.bin_width > 0.0 ? static_cast<std::size_t>((x - lo) / h.bin_width) : 0;
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                            std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto eng = make_engine(seed, kSplitStream);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = std::min(static_cast<std::size_t>(uniform01(eng) * static_cast<double>(i)), i - 1);
    std::swap(idx[i - 1], idx[j]);
  }
  const std::size_t half = n / 2;
  std::vector<std::size_t> train(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(half));
  std::vector<std::size_t> test(idx.begin() + static_cast<std::ptrdiff_t>(half), idx.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

AnalysisReport analyze_dataset(const QuadratureDataset& data, const AnalysisConfig& config) {
  require(config.max_order >= 2 && config.max_order % 2 == 0,
          "max order must be an even integer >= 2, got " + std::to_string(config.max_order));
  require(config.z_threshold > 0.0, "z threshold must be positive");
  AnalysisReport rep;
  rep.config = config;
  rep.sample_count = data.size();
  rep.phase_mode = data.phase_mode();

  std::optional<QuadratureDataset> train_store, test_store;
  if (config.split == SplitMode::half) {
    if (data.size() < 4)
      fail(ErrorKind::insufficient_data, "a half split needs at least four samples");
    const auto [tr, te] = split_indices(data.size(), config.seed);
    train_store = data.select(tr);
    test_store = data.select(te);
  } else {
    rep.warnings.emplace_back(
        "same-data mode: witness coefficients and significance use the same samples, which "
        "biases z_score toward larger magnitude");
  }
  const QuadratureDataset& train = train_store ? *train_store : data;
  const QuadratureDataset& test = test_store ? *test_store : data;
  rep.train_count = train.size();
  rep.test_count = test.size();

  const int feasible = highest_feasible_order(train, config.min_bin_count);
  if (config.max_order > feasible)
    fail(ErrorKind::insufficient_data,
         "requested max order " + std::to_string(config.max_order) +
             " exceeds the highest feasible order " + std::to_string(feasible) +
             " for this dataset");

  MomentOptions mopt;
  mopt.threads = config.threads;
  const auto moments = estimate_radial_moments(train, config.max_order, mopt, config.min_bin_count);
  rep.mu = moments.values();
  rep.mu_stderr = moments.standard_errors().value_or(std::vector<double>(rep.mu.size(), 0.0));
  if (config.bootstrap > 0) {
    if (train.phase_mode() == PhaseMode::randomized)
      rep.mu_bootstrap_stderr =
          bootstrap_radial_stderr(train, config.max_order, config.bootstrap, config.seed);
    else
      rep.warnings.emplace_back("bootstrap cross-check is only available for randomized phases");
  }
  const auto all_values = data.values();
  rep.histogram = freedman_diaconis_histogram(all_values);

  const bool randomized = data.phase_mode() == PhaseMode::randomized;
  if (!randomized)
    rep.warnings.emplace_back(
        "phase-tagged data: the per-sample significance statistic assumes rotational invariance "
        "and is not computed");

  for (int n = 2; n <= config.max_order; n += 2) {
    OrderReport o;
    o.order = n;
    try {
      const auto sol = optimize_witness(moments, n, config.solve);
      o.min_F = sol.min_F;
      o.min_F_shortcut = sol.min_F_shortcut;
      o.diagnostics = sol.diagnostics;
      Witness w = sol.witness;
      if (config.optimize_significance && randomized) {
        try {
          const auto opt = optimize_significance(train, w, config.simplex);
          o.significance_optimized = true;
          o.significance_converged = opt.converged;
          if (!opt.converged) o.note = "significance refinement did not converge; linear witness kept";
          w = opt.witness;
        } catch (const Error& e) {
          o.note = std::string("significance refinement skipped: ") + e.what();
        }
      }
      o.witness_expectation = evaluate_expectation(w, moments);
      o.coeffs = w.coeffs();
      o.scaled_coeffs = w.scaled_coeffs();
      o.scale = w.scale();
      if (randomized) {
        try {
          o.significance = significance(w, test);
        } catch (const Error& e) {
          o.note += (o.note.empty() ? "" : "; ") + std::string(e.what());
        }
      }
    } catch (const IllConditionedError& e) {
      o.diagnostics = e.diagnostics();
      o.note = e.what();
    }
    o.psd = psd_crosscheck(moments, n);
    rep.orders.push_back(std::move(o));
  }

  double prev = std::numeric_limits<double>::infinity();
  for (const auto& o : rep.orders) {
    if (!o.min_F) continue;
    if (*o.min_F > prev + 1e-9) rep.min_F_monotone = false;
    prev = std::min(prev, *o.min_F);
  }
  for (const auto& o : rep.orders) {
    const bool hit = config.mode == OnsetMode::exact
                         ? (o.min_F && *o.min_F < -config.tol_neg)
                         : (o.significance && o.significance->z_score <= -config.z_threshold);
    if (hit) {
      rep.onset_order = o.order;
      break;
    }
  }
  return rep;
}

std::optional<int> onset_order_statistical(const QuadratureDataset& data,
                                           const AnalysisConfig& config) {
  auto cfg = config;
  cfg.mode = OnsetMode::statistical;
  return analyze_dataset(data, cfg).onset_order;
}

std::vector<SweepPoint> sweep_onset(std::span<const double> etas, int max_order, double tol_neg,
                                    const OptimizeOptions& solve) {
  require(!etas.empty(), "eta grid is empty");
  require(max_order >= 2 && max_order % 2 == 0, "max order must be an even integer >= 2");
  std::vector<SweepPoint> out;
  out.reserve(etas.size());
  for (double eta : etas) {
    const auto mu = oracle_radial_moments(StateSpec::fock_mixture(eta), max_order);
    out.push_back({eta, onset_order(mu, max_order, tol_neg, solve).onset});
  }
  return out;
}

std::vector<ProfilePoint> witness_profile_table(const RadialMomentSet& moments, int order,
                                                std::span<const double> r_grid,
                                                const std::optional<StateSpec>& state) {
  const auto sol = optimize_witness(moments, order);
  const auto f = witness_profile(sol.witness, r_grid);
  std::vector<ProfilePoint> out(r_grid.size());
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    out[i].r = r_grid[i];
    out[i].test_function = f[i];
    if (state) out[i].wigner = wigner_radial(*state, r_grid[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

using nlohmann::json;

json to_json(const StateSpec& s) {
  json j{{"kind", std::string(to_string(s.kind()))}};
  switch (s.kind()) {
    case StateKind::fock_mixture: j["eta"] = s.parameter(); break;
    case StateKind::thermal: j["nbar"] = s.parameter(); break;
    case StateKind::coherent_phase_averaged: j["alpha_sq"] = s.parameter(); break;
  }
  return j;
}

StateSpec state_from_json(const json& j) {
  require(j.is_object() && j.contains("kind"), "state spec needs a 'kind'");
  const auto kind = state_kind_from_string(j.at("kind").get<std::string>());
  auto only = [&](const char* key) {
    for (const char* k : {"eta", "nbar", "alpha_sq"})
      if (std::string_view(k) != key && j.contains(k))
        fail(ErrorKind::invalid_argument,
             std::string("parameter '") + k + "' does not apply to " + std::string(to_string(kind)));
    require(j.contains(key), std::string("state spec needs '") + key + "'");
    return j.at(key).get<double>();
  };
  switch (kind) {
    case StateKind::fock_mixture: return StateSpec::fock_mixture(only("eta"));
    case StateKind::thermal: return StateSpec::thermal(only("nbar"));
    case StateKind::coherent_phase_averaged:
      return StateSpec::coherent_phase_averaged(only("alpha_sq"));
  }
  fail(ErrorKind::invalid_argument, "unknown state kind");
}

json to_json(const AnalysisConfig& c) {
  return {{"max_order", c.max_order},
          {"mode", std::string(to_string(c.mode))},
          {"split", std::string(to_string(c.split))},
          {"z_threshold", c.z_threshold},
          {"tol_neg", c.tol_neg},
          {"seed", c.seed},
          {"convention_variance", c.convention_variance},
          {"bootstrap", c.bootstrap},
          {"optimize_significance", c.optimize_significance},
          {"simplex_max_iterations", c.simplex.max_iterations},
          {"simplex_relative_tolerance", c.simplex.relative_tolerance},
          {"rescale", c.solve.rescale},
          {"equilibrate", c.solve.equilibrate},
          {"condition_cap", c.solve.condition_cap},
          {"residual_tolerance", c.solve.residual_tolerance},
          {"min_bin_count", c.min_bin_count},
          {"threads", c.threads}};
}

AnalysisConfig config_from_json(const json& j, AnalysisConfig c) {
  require(j.is_object(), "config must be a JSON object");
  try {
    if (j.contains("max_order")) c.max_order = j.at("max_order").get<int>();
    if (j.contains("mode")) c.mode = onset_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("split")) c.split = split_mode_from_string(j.at("split").get<std::string>());
    if (j.contains("z_threshold")) c.z_threshold = j.at("z_threshold").get<double>();
    if (j.contains("tol_neg")) c.tol_neg = j.at("tol_neg").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("convention_variance"))
      c.convention_variance = j.at("convention_variance").get<double>();
    if (j.contains("bootstrap")) c.bootstrap = j.at("bootstrap").get<int>();
    if (j.contains("optimize_significance"))
      c.optimize_significance = j.at("optimize_significance").get<bool>();
    if (j.contains("simplex_max_iterations"))
      c.simplex.max_iterations = j.at("simplex_max_iterations").get<int>();
    if (j.contains("simplex_relative_tolerance"))
      c.simplex.relative_tolerance = j.at("simplex_relative_tolerance").get<double>();
    if (j.contains("rescale")) c.solve.rescale = j.at("rescale").get<bool>();
    if (j.contains("equilibrate")) c.solve.equilibrate = j.at("equilibrate").get<bool>();
    if (j.contains("condition_cap")) c.solve.condition_cap = j.at("condition_cap").get<double>();
    if (j.contains("residual_tolerance"))
      c.solve.residual_tolerance = j.at("residual_tolerance").get<double>();
    if (j.contains("min_bin_count")) c.min_bin_count = j.at("min_bin_count").get<std::size_t>();
    if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();
  } catch (const json::exception& e) {
    fail(ErrorKind::invalid_argument, std::string("invalid config: ") + e.what());
  }
  return c;
}

namespace {

json to_json(const SolveDiagnostics& d) {
  return {{"condition_number", d.condition_number},
          {"residual", d.residual},
          {"refinement_steps", d.refinement_steps},
          {"rescaled", d.rescaled},
          {"equilibrated", d.equilibrated}};
}

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json to_json(const AnalysisReport& r) {
  json orders = json::array();
  for (const auto& o : r.orders) {
    json jo{{"order", o.order},
            {"min_F", opt(o.min_F)},
            {"min_F_shortcut", opt(o.min_F_shortcut)},
            {"witness_expectation", opt(o.witness_expectation)},
            {"coefficients", o.coeffs},
            {"scaled_coefficients", o.scaled_coeffs},
            {"scale", o.scale},
            {"significance_optimized", o.significance_optimized},
            {"significance_converged", o.significance_converged}};
    if (o.significance) {
      jo["z_score"] = o.significance->z_score;
      jo["G_state"] = o.significance->g_state;
      jo["mean_f"] = o.significance->mean;
      jo["std_f"] = o.significance->stddev;
      jo["significance_samples"] = o.significance->sample_count;
    } else {
      jo["z_score"] = nullptr;
      jo["G_state"] = nullptr;
    }
    jo["diagnostics"] = o.diagnostics ? to_json(*o.diagnostics) : json(nullptr);
    if (o.psd)
      jo["psd"] = {{"psd", o.psd->psd},
                   {"min_eigenvalue", o.psd->min_eigenvalue},
                   {"tolerance", o.psd->tolerance}};
    if (!o.note.empty()) jo["note"] = o.note;
    orders.push_back(std::move(jo));
  }
  json moments{{"mu", r.mu}, {"stderr", r.mu_stderr}};
  if (r.mu_bootstrap_stderr) moments["bootstrap_stderr"] = *r.mu_bootstrap_stderr;
  return {{"schema", std::string(kReportSchema)},
          {"schema_version", kReportSchemaVersion},
          {"library_version", std::string(kVersion)},
          {"convention", {{"vacuum_variance", kVacuumVariance},
                          {"input_vacuum_variance", r.config.convention_variance}}},
          {"config", to_json(r.config)},
          {"seed", r.config.seed},
          {"generator", std::string(kGeneratorName)},
          {"data", {{"sample_count", r.sample_count},
                    {"phase_mode", std::string(to_string(r.phase_mode))},
                    {"train_count", r.train_count},
                    {"test_count", r.test_count}}},
          {"moments", moments},
          {"orders", orders},
          {"onset_order", opt(r.onset_order)},
          {"onset_criterion",
           r.config.mode == OnsetMode::exact
               ? "min_F < -tol_neg"
               : "z_score <= -z_threshold"},
          {"min_F_monotone", r.min_F_monotone},
          {"histogram", {{"rule", r.histogram.rule},
                         {"bin_width", r.histogram.bin_width},
                         {"edges", r.histogram.edges},
                         {"counts", r.histogram.counts}}},
          {"warnings", r.warnings}};
}

}  // namespace qwitness
