#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qwitness/dataset.hpp"
#include "qwitness/error.hpp"
#include "qwitness/moments.hpp"

namespace qwitness {

/// Even radial polynomial M(r) = 1 + sum_{n=1}^{N/2} C_{2n} r^{2n}. The test
/// function is its square, F = M^2, which is non-negative everywhere.
class Witness {
 public:
  /// `coeffs[n-1]` is C_{2n} in original radial units. `scale` is the radial
  /// normalization s used when the coefficients were optimized.
  Witness(int order, std::vector<double> coeffs, double scale = 1.0);

  /// The witness M == 1 of order N.
  static Witness trivial(int order);

  /// Build from coefficients of the rescaled variable r/s.
  static Witness from_scaled(int order, std::span<const double> scaled_coeffs, double scale);

  int order() const noexcept { return order_; }
  int half_order() const noexcept { return order_ / 2; }
  double scale() const noexcept { return scale_; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }

  /// C_{2n} s^{2n}: coefficients of the polynomial in r/s.
  std::vector<double> scaled_coeffs() const;

  /// M(r).
  double polynomial(double r) const;

 private:
  int order_;
  std::vector<double> coeffs_;
  double scale_;
};

/// Hankel matrix S[j][l] = mu[j+l], j,l = 0..N/2, so <F> = c^T S c with
/// c = (1, C_2, ..., C_N).
Eigen::MatrixXd moment_matrix(const RadialMomentSet& moments, int order);

struct OptimizeOptions {
  /// Solve in r/s with s^2 = mu[1].
  bool rescale = true;
  /// Symmetric diagonal scaling of the reduced system before factorization.
  bool equilibrate = true;
  double condition_cap = 1e12;
  double residual_tolerance = 1e-8;
};

struct WitnessSolution {
  Witness witness;
  /// c^T S c at the solution.
  double min_F = 0.0;
  /// 1 + sum_j C_{2j} mu[j], equal to min_F at an exact stationary point.
  double min_F_shortcut = 0.0;
  SolveDiagnostics diagnostics;
};

/// Minimizes <M^2> over the coefficients of an order-N witness by solving the
/// normal equations sum_l mu[l+j] C_{2l} = -mu[j], j = 1..N/2. Throws
/// IllConditionedError when the system is singular, exceeds the condition cap,
/// or the refined residual stays above tolerance.
WitnessSolution optimize_witness(const RadialMomentSet& moments, int order,
                                 const OptimizeOptions& options = {});

/// <M^2> for arbitrary coefficients.
double evaluate_expectation(const Witness& w, const RadialMomentSet& moments);

struct VarianceResult {
  /// <F^2> - <F>^2, clamped at zero when slightly negative.
  double variance = 0.0;
  /// Unclamped value.
  double raw = 0.0;
  /// Raw value below -1e-10 relative: the moments cannot come from a
  /// non-negative radial density.
  bool negative = false;
};

/// Variance of F = M^2 from radial moments up to order 4N.
VarianceResult evaluate_variance(const Witness& w, const RadialMomentSet& moments);

struct Significance {
  std::size_t sample_count = 0;
  /// mean of the per-sample statistic f_i.
  double mean = 0.0;
  double stddev = 0.0;
  /// mean / stddev.
  double g_state = 0.0;
  /// mean / (stddev / sqrt(n)).
  double z_score = 0.0;
};

/// Per-sample weights w_k, k = 1..N, such that the statistic
/// f_i = 1 + sum_k w_k x_i^{2k} has expectation <M^2> for rotationally
/// invariant states. Element 0 is 1.
std::vector<double> sample_statistic_weights(const Witness& w);

/// Significance of the witness on randomized-phase data. Throws
/// insufficient-data for n < 2 and degenerate-statistic when f has zero
/// spread.
Significance significance(const Witness& w, const QuadratureDataset& data);

struct SignificanceOptimization {
  Witness witness;
  /// mean/std ratio at `witness`.
  double objective = 0.0;
  double initial_objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct SimplexOptions {
  int max_iterations = 2000;
  double relative_tolerance = 1e-10;
};

/// Minimizes <F>/sigma_F with sigma_F from radial moments (needs moments up
/// to order 4N), starting from the normal-equation solution.
SignificanceOptimization optimize_significance(const RadialMomentSet& moments, int order,
                                               const SimplexOptions& options = {},
                                               const OptimizeOptions& solve = {});

/// Minimizes mean(f)/std(f) of the per-sample statistic on randomized-phase
/// data, starting from `initial`.
SignificanceOptimization optimize_significance(const QuadratureDataset& data,
                                               const Witness& initial,
                                               const SimplexOptions& options = {});

struct OrderOutcome {
  int order = 0;
  std::optional<double> min_F;
  std::optional<SolveDiagnostics> diagnostics;
  std::string note;
};

struct OnsetResult {
  std::optional<int> onset;
  std::vector<OrderOutcome> orders;
};

/// Smallest even N <= n_max with min_F < -tol_neg. Ill-conditioned orders
/// are skipped and recorded in `orders`.
OnsetResult onset_order(const RadialMomentSet& moments, int n_max, double tol_neg = 1e-9,
                        const OptimizeOptions& options = {});

/// F(r) = M(r)^2 on a grid of radii in original units.
std::vector<double> witness_profile(const Witness& w, std::span<const double> r_grid);

struct PsdCheck {
  bool psd = false;
  /// Smallest eigenvalue of the diagonally equilibrated Hankel matrix.
  double min_eigenvalue = 0.0;
  double tolerance = 0.0;
};

/// Positive semidefiniteness of the (N/2+1)x(N/2+1) Hankel moment matrix,
/// judged on its unit-diagonal form with tolerance 1e-10 * ||S||.
PsdCheck psd_crosscheck(const RadialMomentSet& moments, int order);

}  // namespace qwitness
