#include "qwitness/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "qwitness/error.hpp"
#include "qwitness/rng.hpp"

namespace qwitness {

std::string_view to_string(MomentSource s) noexcept {
  return s == MomentSource::oracle ? "oracle" : "empirical";
}

// ---------------------------------------------------------------------------
// RadialMomentSet

RadialMomentSet::RadialMomentSet(std::vector<double> mu, MomentSource source,
                                 std::optional<std::vector<double>> standard_errors,
                                 std::optional<Eigen::MatrixXd> covariance)
    : mu_(std::move(mu)),
      source_(source),
      stderr_(std::move(standard_errors)),
      cov_(std::move(covariance)) {
  require(!mu_.empty(), "radial moment set is empty");
  require(mu_[0] == 1.0, "radial moment mu[0] must be exactly 1");
  for (std::size_t k = 1; k < mu_.size(); ++k)
    require(std::isfinite(mu_[k]) && mu_[k] >= 0.0,
            "radial moment mu[" + std::to_string(k) + "] must be finite and non-negative");
  if (stderr_) {
    require(stderr_->size() == mu_.size(), "standard error vector length mismatch");
    for (double e : *stderr_) require(std::isfinite(e) && e >= 0.0, "invalid standard error");
  }
  if (cov_) {
    const auto n = static_cast<Eigen::Index>(mu_.size());
    require(cov_->rows() == n && cov_->cols() == n, "covariance shape mismatch");
    const double scale = std::max(cov_->cwiseAbs().maxCoeff(), 1e-300);
    require(((*cov_) - cov_->transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale,
            "covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*cov_, Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() >= -1e-10 * scale,
            "covariance is not positive semidefinite");
  }
}

double RadialMomentSet::mu(int k) const {
  if (k < 0 || k > max_k())
    fail(ErrorKind::incomplete_input,
         "radial moment mu[" + std::to_string(k) + "] not available (max k = " +
             std::to_string(max_k()) + ")");
  return mu_[static_cast<std::size_t>(k)];
}

void RadialMomentSet::require_k(int k_needed, std::string_view what) const {
  if (k_needed > max_k())
    fail(ErrorKind::incomplete_input,
         std::string(what) + " needs <r^" + std::to_string(2 * k_needed) +
             "> but moments stop at <r^" + std::to_string(max_order()) + ">");
}

RadialMomentSet RadialMomentSet::rescaled(double s) const {
  require(std::isfinite(s) && s > 0.0, "rescale factor must be positive");
  const double s2inv = 1.0 / (s * s);
  std::vector<double> f(mu_.size());
  double acc = 1.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    f[k] = acc;
    acc *= s2inv;
  }
  std::vector<double> m(mu_.size());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = mu_[k] * f[k];
  m[0] = 1.0;
  std::optional<std::vector<double>> e;
  if (stderr_) {
    e.emplace(stderr_->size());
    for (std::size_t k = 0; k < e->size(); ++k) (*e)[k] = (*stderr_)[k] * f[k];
  }
  std::optional<Eigen::MatrixXd> c;
  if (cov_) {
    const Eigen::VectorXd fv = Eigen::Map<const Eigen::VectorXd>(f.data(), f.size());
    c = fv.asDiagonal() * (*cov_) * fv.asDiagonal();
  }
  return RadialMomentSet(std::move(m), source_, std::move(e), std::move(c));
}

RadialMomentSet RadialMomentSet::truncated(int k_max) const {
  require_k(k_max, "truncation");
  require(k_max >= 0, "negative truncation order");
  const auto n = static_cast<std::size_t>(k_max) + 1;
  std::vector<double> m(mu_.begin(), mu_.begin() + static_cast<std::ptrdiff_t>(n));
  std::optional<std::vector<double>> e;
  if (stderr_) e.emplace(stderr_->begin(), stderr_->begin() + static_cast<std::ptrdiff_t>(n));
  std::optional<Eigen::MatrixXd> c;
  if (cov_) c = cov_->topLeftCorner(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  return RadialMomentSet(std::move(m), source_, std::move(e), std::move(c));
}

// ---------------------------------------------------------------------------
// Coefficients

Rational angular_coefficient(int n) {
  require(n >= 1, "angular_coefficient: N must be >= 1, got " + std::to_string(n));
  require(n <= 31, "angular_coefficient: N above exact range (31)");
  const uint128 pow4 = static_cast<uint128>(1) << (2 * n);
  return make_rational(pow4, static_cast<uint128>(central_binomial(n)) *
                                 static_cast<unsigned>(2 * n));
}

// ---------------------------------------------------------------------------
// Empirical power moments

namespace {

// Runs `body(chunk_index, begin, end)` over fixed-size chunks, optionally on
// several threads. Chunk boundaries depend only on `chunk`.
template <class Body>
void for_each_chunk(std::size_t n, std::size_t chunk, unsigned threads, Body&& body) {
  const std::size_t nchunks = (n + chunk - 1) / chunk;
  auto run = [&](std::size_t first, std::size_t stride) {
    for (std::size_t c = first; c < nchunks; c += stride)
      body(c, c * chunk, std::min(n, (c + 1) * chunk));
  };
  if (threads <= 1 || nchunks <= 1) {
    run(0, 1);
    return;
  }
  const auto t = std::min<std::size_t>(threads, nchunks);
  std::vector<std::jthread> pool;
  pool.reserve(t);
  for (std::size_t i = 0; i < t; ++i) pool.emplace_back([&, i] { run(i, t); });
}

}  // namespace

std::vector<double> empirical_power_means(const QuadratureDataset& data, int max_power,
                                          const MomentOptions& options) {
  require(max_power >= 2 && max_power % 2 == 0,
          "max_power must be an even integer >= 2, got " + std::to_string(max_power));
  require(options.chunk_size > 0, "chunk size must be positive");
  const std::size_t n = data.size();
  const auto K = static_cast<std::size_t>(max_power / 2);
  const std::size_t nchunks = (n + options.chunk_size - 1) / options.chunk_size;
  std::vector<std::vector<CompensatedSum>> partial(nchunks, std::vector<CompensatedSum>(K + 1));
  for_each_chunk(n, options.chunk_size, options.threads,
                 [&](std::size_t c, std::size_t b, std::size_t e) {
                   auto& acc = partial[c];
                   for (std::size_t i = b; i < e; ++i) {
                     const double y = data.value(i) * data.value(i);
                     double p = 1.0;
                     for (std::size_t k = 1; k <= K; ++k) {
                       p *= y;
                       acc[k].add(p);
                     }
                   }
                 });
  std::vector<double> mean(K + 1, 1.0);
  for (std::size_t k = 1; k <= K; ++k) {
    CompensatedSum s;
    for (const auto& part : partial) s.add(part[k]);
    mean[k] = s.value() / static_cast<double>(n);
    if (!std::isfinite(mean[k]))
      fail(ErrorKind::insufficient_data,
           "power moment <x^" + std::to_string(2 * k) + "> overflows double precision");
  }
  return mean;
}

PowerMoments empirical_power_moments(const QuadratureDataset& data, int max_power,
                                     const MomentOptions& options) {
  const std::size_t n = data.size();
  if (n < 2)
    fail(ErrorKind::insufficient_data,
         "at least two samples are needed for standard errors, got " + std::to_string(n));
  auto mean = empirical_power_means(data, max_power, options);
  const auto K = static_cast<std::size_t>(max_power / 2);
  const std::size_t nchunks = (n + options.chunk_size - 1) / options.chunk_size;

  // Pass 2: centered cross products.
  std::vector<std::vector<CompensatedSum>> cross(nchunks, std::vector<CompensatedSum>(K * K));
  for_each_chunk(n, options.chunk_size, options.threads,
                 [&](std::size_t c, std::size_t b, std::size_t e) {
                   auto& acc = cross[c];
                   std::vector<double> d(K);
                   for (std::size_t i = b; i < e; ++i) {
                     const double y = data.value(i) * data.value(i);
                     double p = 1.0;
                     for (std::size_t k = 0; k < K; ++k) {
                       p *= y;
                       d[k] = p - mean[k + 1];
                     }
                     for (std::size_t j = 0; j < K; ++j)
                       for (std::size_t l = j; l < K; ++l) acc[j * K + l].add(d[j] * d[l]);
                   }
                 });
  PowerMoments out;
  out.sample_count = n;
  out.mean = std::move(mean);
  out.covariance = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K + 1),
                                         static_cast<Eigen::Index>(K + 1));
  const double denom = static_cast<double>(n - 1) * static_cast<double>(n);
  for (std::size_t j = 0; j < K; ++j)
    for (std::size_t l = j; l < K; ++l) {
      CompensatedSum s;
      for (const auto& part : cross) s.add(part[j * K + l]);
      const double v = s.value() / denom;
      out.covariance(static_cast<Eigen::Index>(j + 1), static_cast<Eigen::Index>(l + 1)) = v;
      out.covariance(static_cast<Eigen::Index>(l + 1), static_cast<Eigen::Index>(j + 1)) = v;
    }
  out.standard_error.assign(K + 1, 0.0);
  for (std::size_t k = 1; k <= K; ++k)
    out.standard_error[k] =
        std::sqrt(std::max(0.0, out.covariance(static_cast<Eigen::Index>(k),
                                               static_cast<Eigen::Index>(k))));
  return out;
}

// ---------------------------------------------------------------------------
// Symmetric conversion

namespace {

// Makes a covariance estimate exactly symmetric and clips the tiny negative
// eigenvalues that rounding leaves behind for near-collinear powers.
Eigen::MatrixXd symmetrized_psd(const Eigen::MatrixXd& c) {
  Eigen::MatrixXd s = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() >= 0.0) return s;
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd r = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (r + r.transpose());
}

}  // namespace

RadialMomentSet radial_moments_symmetric(const PowerMoments& pm) {
  const int K = pm.max_k();
  require(K >= 1, "power moments must reach at least <x^2>");
  if (pm.standard_error.size() != pm.mean.size() || pm.covariance.rows() != K + 1)
    fail(ErrorKind::incomplete_input, "power moments lack errors or covariance");
  std::vector<double> factor(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) factor[static_cast<std::size_t>(k)] = radial_factor(k);
  std::vector<double> mu(factor.size()), se(factor.size());
  for (std::size_t k = 0; k < factor.size(); ++k) {
    mu[k] = factor[k] * pm.mean[k];
    se[k] = factor[k] * pm.standard_error[k];
  }
  mu[0] = 1.0;
  se[0] = 0.0;
  const Eigen::VectorXd f = Eigen::Map<const Eigen::VectorXd>(factor.data(), K + 1);
  Eigen::MatrixXd cov = f.asDiagonal() * pm.covariance * f.asDiagonal();
  return RadialMomentSet(std::move(mu), MomentSource::empirical, std::move(se),
                         symmetrized_psd(cov));
}

RadialMomentSet radial_moments_symmetric(const std::map<int, double>& x_moments, int max_k,
                                         MomentSource source) {
  require(max_k >= 1, "max_k must be >= 1");
  std::vector<double> mu(static_cast<std::size_t>(max_k) + 1, 1.0);
  for (int k = 1; k <= max_k; ++k) {
    auto it = x_moments.find(k);
    if (it == x_moments.end())
      fail(ErrorKind::incomplete_input,
           "missing quadrature moment <x^" + std::to_string(2 * k) + ">");
    mu[static_cast<std::size_t>(k)] = radial_factor(k) * it->second;
  }
  return RadialMomentSet(std::move(mu), source);
}

// ---------------------------------------------------------------------------
// Angular conversion

MomentEstimate radial_moments_angular(const QuadratureDataset& data, int n,
                                      std::size_t min_bin_count) {
  require(n >= 1, "angular conversion needs N >= 1");
  require(data.phase_mode() == PhaseMode::tagged,
          "angular conversion needs a phase-tagged dataset");
  const int bins = 2 * n;
  const double step = std::numbers::pi / bins;
  std::vector<std::size_t> count(static_cast<std::size_t>(bins), 0);
  std::vector<CompensatedSum> s1(static_cast<std::size_t>(bins));
  std::vector<std::size_t> bin_of(data.size());
  const auto phases = data.phases();
  for (std::size_t i = 0; i < data.size(); ++i) {
    // Target angles m*step, m = 1..2N; m = 2N (angle pi) is the same
    // quadrature as angle 0 up to sign.
    const double a = std::fmod(phases[i], std::numbers::pi);
    auto m = static_cast<long>(std::lround(a / step)) % bins;
    if (m == 0) m = bins;
    const auto b = static_cast<std::size_t>(m - 1);
    bin_of[i] = b;
    ++count[b];
    s1[b].add(std::pow(data.value(i), 2 * n));
  }
  std::vector<int> deficient;
  for (int b = 0; b < bins; ++b)
    if (count[static_cast<std::size_t>(b)] < std::max<std::size_t>(min_bin_count, 2))
      deficient.push_back(b + 1);
  if (!deficient.empty()) {
    std::string list;
    for (int d : deficient) list += (list.empty() ? "" : ",") + std::to_string(d);
    throw AngularCoverageError("insufficient angular coverage for <r^" + std::to_string(2 * n) +
                                   ">: bins m in {" + list + "} (angle m*pi/" +
                                   std::to_string(bins) + ") have fewer than " +
                                   std::to_string(min_bin_count) + " samples",
                               std::move(deficient));
  }
  std::vector<double> mean(static_cast<std::size_t>(bins));
  for (std::size_t b = 0; b < mean.size(); ++b)
    mean[b] = s1[b].value() / static_cast<double>(count[b]);
  std::vector<CompensatedSum> s2(static_cast<std::size_t>(bins));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double d = std::pow(data.value(i), 2 * n) - mean[bin_of[i]];
    s2[bin_of[i]].add(d * d);
  }
  const double a = angular_coefficient(n).value();
  CompensatedSum total, var;
  for (std::size_t b = 0; b < mean.size(); ++b) {
    const auto c = static_cast<double>(count[b]);
    total.add(mean[b]);
    var.add(s2[b].value() / (c - 1.0) / c);
  }
  return {a * total.value(), a * std::sqrt(var.value())};
}

RadialMomentSet estimate_radial_moments(const QuadratureDataset& data, int max_k,
                                        const MomentOptions& options,
                                        std::size_t min_bin_count) {
  require(max_k >= 1, "max_k must be >= 1");
  if (data.phase_mode() == PhaseMode::randomized)
    return radial_moments_symmetric(empirical_power_moments(data, 2 * max_k, options));
  std::vector<double> mu(static_cast<std::size_t>(max_k) + 1, 1.0);
  std::vector<double> se(mu.size(), 0.0);
  for (int k = 1; k <= max_k; ++k) {
    const auto est = radial_moments_angular(data, k, min_bin_count);
    mu[static_cast<std::size_t>(k)] = est.value;
    se[static_cast<std::size_t>(k)] = est.standard_error;
  }
  return RadialMomentSet(std::move(mu), MomentSource::empirical, std::move(se));
}

std::vector<double> bootstrap_radial_stderr(const QuadratureDataset& data, int max_k,
                                            int resamples, std::uint64_t seed) {
  require(resamples >= 2, "bootstrap needs at least two resamples");
  require(max_k >= 1, "max_k must be >= 1");
  const std::size_t n = data.size();
  if (n < 2) fail(ErrorKind::insufficient_data, "bootstrap needs at least two samples");
  const auto K = static_cast<std::size_t>(max_k);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = data.value(i) * data.value(i);
  std::vector<std::vector<double>> draws(K + 1, std::vector<double>(static_cast<std::size_t>(resamples)));
  std::vector<CompensatedSum> acc(K + 1);
  for (int r = 0; r < resamples; ++r) {
    auto eng = make_engine(seed, static_cast<std::uint64_t>(r));
    std::fill(acc.begin(), acc.end(), CompensatedSum{});
    for (std::size_t i = 0; i < n; ++i) {
      // Index drawn from the raw 64-bit output so the stream is portable.
      const auto j = static_cast<std::size_t>(uniform01(eng) * static_cast<double>(n));
      const double yy = y[std::min(j, n - 1)];
      double p = 1.0;
      for (std::size_t k = 1; k <= K; ++k) {
        p *= yy;
        acc[k].add(p);
      }
    }
    for (std::size_t k = 1; k <= K; ++k)
      draws[k][static_cast<std::size_t>(r)] =
          radial_factor(static_cast<int>(k)) * acc[k].value() / static_cast<double>(n);
  }
  std::vector<double> out(K + 1, 0.0);
  const auto R = static_cast<double>(resamples);
  for (std::size_t k = 1; k <= K; ++k) {
    const double m = compensated_sum(draws[k]) / R;
    CompensatedSum ss;
    for (double d : draws[k]) ss.add((d - m) * (d - m));
    out[k] = std::sqrt(ss.value() / (R - 1.0));
  }
  return out;
}

}  // namespace qwitness
