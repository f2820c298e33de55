#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qwitness/dataset.hpp"
#include "qwitness/numeric.hpp"

namespace qwitness {

enum class MomentSource { empirical, oracle };

std::string_view to_string(MomentSource s) noexcept;

/// Radial phase-space moments mu[k] = <r^{2k}>, k = 0..K.
///
/// mu[0] is always exactly 1. The optional covariance is (K+1)x(K+1) over the
/// estimators of mu[0..K]; its row and column 0 are zero.
class RadialMomentSet {
 public:
  /// Validating constructor. `mu` must start with 1 and hold non-negative
  /// finite values; `stderr_` (if given) must have the same length;
  /// `cov` (if given) must be symmetric PSD to 1e-10 relative.
  RadialMomentSet(std::vector<double> mu, MomentSource source,
                  std::optional<std::vector<double>> standard_errors = std::nullopt,
                  std::optional<Eigen::MatrixXd> covariance = std::nullopt);

  /// K, the largest k with mu[k] available.
  int max_k() const noexcept { return static_cast<int>(mu_.size()) - 1; }
  /// 2K, the largest power of r covered.
  int max_order() const noexcept { return 2 * max_k(); }

  double mu(int k) const;
  const std::vector<double>& values() const noexcept { return mu_; }
  MomentSource source() const noexcept { return source_; }
  const std::optional<std::vector<double>>& standard_errors() const noexcept { return stderr_; }
  const std::optional<Eigen::MatrixXd>& covariance() const noexcept { return cov_; }

  /// Moments of r/s: mu[k] / s^{2k}. Errors are scaled alongside.
  RadialMomentSet rescaled(double s) const;

  /// Keep only mu[0..k_max].
  RadialMomentSet truncated(int k_max) const;

  /// Throws incomplete-input unless mu[k] is present for every k <= k_needed.
  void require_k(int k_needed, std::string_view what) const;

 private:
  std::vector<double> mu_;
  MomentSource source_;
  std::optional<std::vector<double>> stderr_;
  std::optional<Eigen::MatrixXd> cov_;
};

/// Sample means of x^{2k}, k = 0..K, with their statistical errors.
struct PowerMoments {
  std::size_t sample_count = 0;
  /// mean[k] = (1/n) sum_i x_i^{2k}; mean[0] = 1.
  std::vector<double> mean;
  /// Standard error of mean[k]: sample std of x^{2k} over sqrt(n).
  std::vector<double> standard_error;
  /// (K+1)x(K+1) covariance of the mean estimators (sample covariance / n);
  /// row and column 0 are zero.
  Eigen::MatrixXd covariance;

  int max_k() const noexcept { return static_cast<int>(mean.size()) - 1; }
};

struct MomentOptions {
  /// Reduction chunk. Results are reproducible for a fixed chunk size
  /// regardless of `threads`.
  std::size_t chunk_size = 8192;
  unsigned threads = 1;
};

/// A_{2N} = (2N choose N)^{-1} 2^{2N} / (2N), exact. Valid for 1 <= N <= 31.
Rational angular_coefficient(int n);

/// Sample means of x^{2k}, k = 0..max_power/2, without error estimates.
std::vector<double> empirical_power_means(const QuadratureDataset& data, int max_power,
                                          const MomentOptions& options = {});

/// Means, standard errors and covariance of x^2, x^4, ..., x^{max_power}.
/// Values are taken in the library convention. Throws insufficient-data for
/// fewer than two samples.
PowerMoments empirical_power_moments(const QuadratureDataset& data, int max_power,
                                     const MomentOptions& options = {});

/// mu[k] = B_{2k} <x^{2k}> for a rotationally invariant state, with errors
/// propagated through the same linear factors.
RadialMomentSet radial_moments_symmetric(const PowerMoments& power_moments);

/// Same conversion from bare values k -> <x^{2k}> (k = 1..K). A gap in the
/// keys below K raises incomplete-input.
RadialMomentSet radial_moments_symmetric(const std::map<int, double>& x_moments, int max_k,
                                         MomentSource source = MomentSource::oracle);

struct MomentEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// <r^{2N}> from phase-tagged data through the 2N-angle identity. Each
/// sample is assigned to the nearest target angle m*pi/(2N) modulo pi.
MomentEstimate radial_moments_angular(const QuadratureDataset& data, int n,
                                      std::size_t min_bin_count = 100);

/// Empirical radial moments up to k = max_k, dispatching on the phase mode
/// of `data` (symmetric path for randomized phases, angular path for tagged).
RadialMomentSet estimate_radial_moments(const QuadratureDataset& data, int max_k,
                                        const MomentOptions& options = {},
                                        std::size_t min_bin_count = 100);

/// Bootstrap standard errors of mu[1..max_k] on the symmetric path.
/// Element 0 is 0.
std::vector<double> bootstrap_radial_stderr(const QuadratureDataset& data, int max_k,
                                            int resamples, std::uint64_t seed);

}  // namespace qwitness
