#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qwitness/dataset.hpp"
#include "qwitness/moments.hpp"
#include "qwitness/states.hpp"
#include "qwitness/witness.hpp"

namespace qwitness {

enum class OnsetMode { exact, statistical };
enum class SplitMode { same, half };

std::string_view to_string(OnsetMode m) noexcept;
std::string_view to_string(SplitMode m) noexcept;
OnsetMode onset_mode_from_string(std::string_view s);
SplitMode split_mode_from_string(std::string_view s);

struct AnalysisConfig {
  int max_order = 16;
  OnsetMode mode = OnsetMode::statistical;
  /// half: coefficients from a seeded 50% training subset, significance on
  /// the rest. same: both on the full record.
  SplitMode split = SplitMode::half;
  double z_threshold = 5.0;
  double tol_neg = 1e-9;
  std::uint64_t seed = 1;
  double convention_variance = kVacuumVariance;
  /// Bootstrap resamples for a standard-error cross-check; 0 disables.
  int bootstrap = 0;
  /// Refine each order's witness by minimizing mean(f)/std(f) on the
  /// training data.
  bool optimize_significance = false;
  SimplexOptions simplex;
  OptimizeOptions solve;
  std::size_t min_bin_count = 100;
  unsigned threads = 1;
};

struct OrderReport {
  int order = 0;
  /// Linear optimum of <M^2> on the training moments.
  std::optional<double> min_F;
  std::optional<double> min_F_shortcut;
  /// <M^2> of the reported witness on the training moments (differs from
  /// min_F only after significance refinement).
  std::optional<double> witness_expectation;
  std::optional<Significance> significance;
  std::vector<double> coeffs;
  std::vector<double> scaled_coeffs;
  double scale = 1.0;
  std::optional<SolveDiagnostics> diagnostics;
  std::optional<PsdCheck> psd;
  bool significance_optimized = false;
  bool significance_converged = false;
  std::string note;
};

struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  double bin_width = 0.0;
  std::string rule;
};

struct AnalysisReport {
  AnalysisConfig config;
  std::size_t sample_count = 0;
  PhaseMode phase_mode = PhaseMode::randomized;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::vector<double> mu;
  std::vector<double> mu_stderr;
  std::optional<std::vector<double>> mu_bootstrap_stderr;
  std::vector<OrderReport> orders;
  std::optional<int> onset_order;
  bool min_F_monotone = true;
  Histogram histogram;
  std::vector<std::string> warnings;
};

/// Largest even witness order the data can support: the Hankel system of
/// order N needs more than N/2 distinct non-zero |x| values (randomized) or
/// full angular coverage of every conversion up to <r^{2N}> (tagged).
int highest_feasible_order(const QuadratureDataset& data, std::size_t min_bin_count = 100);

/// Freedman-Diaconis histogram; falls back to Sturges when the IQR is zero.
Histogram freedman_diaconis_histogram(std::span<const double> values);

/// Seeded 50/50 split of sample indices: first = training, second = test.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(std::size_t n,
                                                                            std::uint64_t seed);

/// Full per-order witness analysis of a dataset.
AnalysisReport analyze_dataset(const QuadratureDataset& data, const AnalysisConfig& config);

/// Statistical onset: smallest even N with z_score <= -z_threshold.
std::optional<int> onset_order_statistical(const QuadratureDataset& data,
                                           const AnalysisConfig& config);

struct SweepPoint {
  double eta = 0.0;
  std::optional<int> onset;
};

/// Exact-mode onset order of the vacuum/single-photon mixture over a grid of
/// single-photon fractions.
std::vector<SweepPoint> sweep_onset(std::span<const double> etas, int max_order,
                                    double tol_neg = 1e-9, const OptimizeOptions& solve = {});

struct ProfilePoint {
  double r = 0.0;
  double test_function = 0.0;
  std::optional<double> wigner;
};

/// (r, F(r), W(r)) triples for the optimal order-N witness of `moments`; W
/// only when a state is given.
std::vector<ProfilePoint> witness_profile_table(const RadialMomentSet& moments, int order,
                                                std::span<const double> r_grid,
                                                const std::optional<StateSpec>& state);

// JSON serialization -------------------------------------------------------

inline constexpr std::string_view kReportSchema = "qwitness.report";
inline constexpr int kReportSchemaVersion = 1;

nlohmann::json to_json(const StateSpec& s);
StateSpec state_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AnalysisConfig& c);
/// Applies the keys present in `j` on top of `base`.
AnalysisConfig config_from_json(const nlohmann::json& j, AnalysisConfig base = {});
nlohmann::json to_json(const AnalysisReport& r);

}  // namespace qwitness
