#include "qwitness/witness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qwitness/linalg.hpp"
#include "qwitness/nelder_mead.hpp"
#include "qwitness/numeric.hpp"

namespace qwitness {

// ---------------------------------------------------------------------------
// Witness

Witness::Witness(int order, std::vector<double> coeffs, double scale)
    : order_(order), coeffs_(std::move(coeffs)), scale_(scale) {
  require(order >= 2 && order % 2 == 0,
          "witness order must be an even integer >= 2, got " + std::to_string(order));
  require(coeffs_.size() == static_cast<std::size_t>(order / 2),
          "witness of order " + std::to_string(order) + " needs " + std::to_string(order / 2) +
              " coefficients, got " + std::to_string(coeffs_.size()));
  require(std::isfinite(scale) && scale > 0.0, "witness scale must be positive and finite");
  for (double c : coeffs_) require(std::isfinite(c), "witness coefficient is not finite");
}

Witness Witness::trivial(int order) {
  return Witness(order, std::vector<double>(static_cast<std::size_t>(std::max(order, 0) / 2), 0.0));
}

Witness Witness::from_scaled(int order, std::span<const double> scaled, double scale) {
  require(std::isfinite(scale) && scale > 0.0, "witness scale must be positive and finite");
  std::vector<double> c(scaled.begin(), scaled.end());
  const double s2inv = 1.0 / (scale * scale);
  double f = 1.0;
  for (double& v : c) {
    f *= s2inv;
    v *= f;
  }
  return Witness(order, std::move(c), scale);
}

std::vector<double> Witness::scaled_coeffs() const {
  std::vector<double> c = coeffs_;
  const double s2 = scale_ * scale_;
  double f = 1.0;
  for (double& v : c) {
    f *= s2;
    v *= f;
  }
  return c;
}

double Witness::polynomial(double r) const {
  const double t = (r / scale_) * (r / scale_);
  const auto cs = scaled_coeffs();
  double m = 0.0;
  for (auto it = cs.rbegin(); it != cs.rend(); ++it) m = (m + *it) * t;
  return 1.0 + m;
}

// ---------------------------------------------------------------------------
// Helpers on plain coefficient/moment vectors. `c` always includes c[0] = 1.

namespace {

std::vector<double> with_unit_constant(std::span<const double> tail) {
  std::vector<double> c;
  c.reserve(tail.size() + 1);
  c.push_back(1.0);
  c.insert(c.end(), tail.begin(), tail.end());
  return c;
}

std::vector<double> self_convolution(std::span<const double> c) {
  std::vector<double> q(2 * c.size() - 1, 0.0);
  for (std::size_t j = 0; j < c.size(); ++j)
    for (std::size_t l = 0; l < c.size(); ++l) q[j + l] += c[j] * c[l];
  return q;
}

// sum_{j,l} c_j c_l mu[j+l]
double quadratic_form(std::span<const double> c, std::span<const double> mu) {
  CompensatedSum s;
  for (std::size_t j = 0; j < c.size(); ++j)
    for (std::size_t l = 0; l < c.size(); ++l) s.add(c[j] * c[l] * mu[j + l]);
  return s.value();
}

struct Moments2 {
  double first = 0.0;   // <M^2>
  double second = 0.0;  // <M^4>
};

Moments2 second_order_moments(std::span<const double> c, std::span<const double> mu) {
  const auto q = self_convolution(c);
  return {quadratic_form(c, mu), quadratic_form(q, mu)};
}

double radial_scale_of(const RadialMomentSet& m) {
  const double mu1 = m.max_k() >= 1 ? m.mu(1) : 0.0;
  return mu1 > 0.0 ? std::sqrt(mu1) : 1.0;
}

std::string format_diag(const SolveDiagnostics& d) {
  std::ostringstream os;
  os << "condition number " << d.condition_number << ", residual " << d.residual;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Moment matrix and the linear optimization

Eigen::MatrixXd moment_matrix(const RadialMomentSet& moments, int order) {
  require(order >= 2 && order % 2 == 0, "order must be an even integer >= 2");
  moments.require_k(order, "moment matrix of order " + std::to_string(order));
  const int h = order / 2;
  Eigen::MatrixXd s(h + 1, h + 1);
  for (int j = 0; j <= h; ++j)
    for (int l = 0; l <= h; ++l) s(j, l) = moments.mu(j + l);
  return s;
}

WitnessSolution optimize_witness(const RadialMomentSet& moments, int order,
                                 const OptimizeOptions& options) {
  require(order >= 2 && order % 2 == 0,
          "witness order must be an even integer >= 2, got " + std::to_string(order));
  moments.require_k(order, "witness of order " + std::to_string(order));
  const int h = order / 2;
  const double s = options.rescale ? radial_scale_of(moments) : 1.0;
  const RadialMomentSet scaled = moments.truncated(order).rescaled(s);
  const auto& mu = scaled.values();

  Eigen::MatrixXd a(h, h);
  Eigen::VectorXd b(h);
  for (int j = 1; j <= h; ++j) {
    b(j - 1) = -mu[static_cast<std::size_t>(j)];
    for (int l = 1; l <= h; ++l) a(j - 1, l - 1) = mu[static_cast<std::size_t>(j + l)];
  }
  Eigen::VectorXd d = Eigen::VectorXd::Ones(h);
  if (options.equilibrate)
    for (int j = 0; j < h; ++j)
      if (a(j, j) > 0.0) d(j) = 1.0 / std::sqrt(a(j, j));
  const Eigen::MatrixXd a_eq = d.asDiagonal() * a * d.asDiagonal();
  const Eigen::VectorXd b_eq = d.cwiseProduct(b);

  SolveDiagnostics diag;
  diag.rescaled = options.rescale;
  diag.equilibrated = options.equilibrate;
  const auto sol = solve_symmetric(a_eq, b_eq);
  diag.condition_number = sol.condition_number;
  diag.refinement_steps = sol.refinement_steps;

  if (sol.singular) {
    diag.residual = std::numeric_limits<double>::infinity();
    throw IllConditionedError("moment system of order " + std::to_string(order) +
                                  " is singular (" + format_diag(diag) + ")",
                              diag);
  }
  const Eigen::VectorXd c = d.cwiseProduct(sol.x);

  // Residual of the unequilibrated (but rescaled) system, extended precision.
  long double rn = 0.0L, bn = 0.0L;
  for (int i = 0; i < h; ++i) {
    long double r = b(i);
    for (int j = 0; j < h; ++j) r -= static_cast<long double>(a(i, j)) * c(j);
    rn += r * r;
    bn += static_cast<long double>(b(i)) * b(i);
  }
  diag.residual = bn > 0.0L ? static_cast<double>(std::sqrt(rn / bn)) : static_cast<double>(std::sqrt(rn));

  if (!(diag.condition_number <= options.condition_cap))
    throw IllConditionedError("moment system of order " + std::to_string(order) +
                                  " exceeds the condition cap " +
                                  std::to_string(options.condition_cap) + " (" +
                                  format_diag(diag) + ")",
                              diag);
  if (!(diag.residual < options.residual_tolerance))
    throw IllConditionedError("moment system of order " + std::to_string(order) +
                                  " could not be solved to the residual tolerance (" +
                                  format_diag(diag) + ")",
                              diag);

  std::vector<double> cs(c.data(), c.data() + h);
  const auto full = with_unit_constant(cs);
  const double quad = quadratic_form(full, mu);
  CompensatedSum shortcut;
  shortcut.add(1.0);
  for (int j = 1; j <= h; ++j) shortcut.add(cs[static_cast<std::size_t>(j - 1)] * mu[static_cast<std::size_t>(j)]);

  return {Witness::from_scaled(order, cs, s), quad, shortcut.value(), diag};
}

double evaluate_expectation(const Witness& w, const RadialMomentSet& moments) {
  moments.require_k(w.order(), "expectation of an order-" + std::to_string(w.order()) + " witness");
  const auto scaled = moments.truncated(w.order()).rescaled(w.scale());
  return quadratic_form(with_unit_constant(w.scaled_coeffs()), scaled.values());
}

VarianceResult evaluate_variance(const Witness& w, const RadialMomentSet& moments) {
  moments.require_k(2 * w.order(),
                    "variance of an order-" + std::to_string(w.order()) + " witness");
  const auto scaled = moments.truncated(2 * w.order()).rescaled(w.scale());
  const auto m = second_order_moments(with_unit_constant(w.scaled_coeffs()), scaled.values());
  VarianceResult out;
  out.raw = m.second - m.first * m.first;
  const double scale = std::max({std::fabs(m.second), m.first * m.first, 1e-300});
  out.negative = out.raw < -1e-10 * scale;
  out.variance = std::max(out.raw, 0.0);
  return out;
}

// ---------------------------------------------------------------------------
// Per-sample statistic

namespace {

// Weights of f = 1 + sum_k w_k t^k for t = (x/s)^2, index 0 unused.
std::vector<double> scaled_sample_weights(const Witness& w) {
  const auto q = self_convolution(with_unit_constant(w.scaled_coeffs()));
  std::vector<double> out(q.size());
  out[0] = 1.0;
  for (std::size_t k = 1; k < q.size(); ++k) out[k] = radial_factor(static_cast<int>(k)) * q[k];
  return out;
}

void require_randomized(const QuadratureDataset& data) {
  require(data.phase_mode() == PhaseMode::randomized,
          "the per-sample statistic needs randomized-phase data");
}

}  // namespace

std::vector<double> sample_statistic_weights(const Witness& w) {
  auto out = scaled_sample_weights(w);
  const double s2inv = 1.0 / (w.scale() * w.scale());
  double f = 1.0;
  for (std::size_t k = 1; k < out.size(); ++k) {
    f *= s2inv;
    out[k] *= f;
  }
  return out;
}

Significance significance(const Witness& w, const QuadratureDataset& data) {
  require_randomized(data);
  const std::size_t n = data.size();
  if (n < 2)
    fail(ErrorKind::insufficient_data,
         "significance needs at least two samples, got " + std::to_string(n));
  const auto ws = scaled_sample_weights(w);
  const double sinv = 1.0 / w.scale();
  // The mean goes through the moment pipeline so that it is bit-identical to
  // evaluate_expectation on the empirical radial moments of the same data.
  auto mu = empirical_power_means(data, 2 * w.order());
  for (std::size_t k = 1; k < mu.size(); ++k) mu[k] *= radial_factor(static_cast<int>(k));
  Significance out;
  out.sample_count = n;
  out.mean = evaluate_expectation(w, RadialMomentSet(std::move(mu), MomentSource::empirical));
  CompensatedSum ss;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = data.value(i) * sinv;
    const double t = x * x;
    double acc = 0.0;
    for (std::size_t k = ws.size() - 1; k >= 1; --k) acc = (acc + ws[k]) * t;
    const double d = 1.0 + acc - out.mean;
    ss.add(d * d);
  }
  out.stddev = std::sqrt(ss.value() / static_cast<double>(n - 1));
  if (!(out.stddev > 0.0) || !std::isfinite(out.stddev))
    fail(ErrorKind::degenerate_statistic,
         "per-sample witness statistic has zero or undefined spread");
  out.g_state = out.mean / out.stddev;
  out.z_score = out.g_state * std::sqrt(static_cast<double>(n));
  return out;
}

// ---------------------------------------------------------------------------
// Ratio optimization

namespace {

std::vector<double> simplex_steps(std::span<const double> x0) {
  std::vector<double> step(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i)
    step[i] = x0[i] != 0.0 ? 0.05 * std::fabs(x0[i]) : 1e-3;
  return step;
}

SignificanceOptimization finish(const Witness& init, double init_obj, const SimplexResult& r,
                                int order, double scale) {
  SignificanceOptimization out{init, init_obj, init_obj, r.iterations, r.converged};
  // Non-convergence returns the starting point; so does a result that is not
  // strictly better.
  if (r.converged && r.value < init_obj) {
    out.witness = Witness::from_scaled(order, r.x, scale);
    out.objective = r.value;
  }
  return out;
}

}  // namespace

SignificanceOptimization optimize_significance(const RadialMomentSet& moments, int order,
                                               const SimplexOptions& options,
                                               const OptimizeOptions& solve) {
  require(order >= 2 && order % 2 == 0, "order must be an even integer >= 2");
  moments.require_k(2 * order, "significance optimization of order " + std::to_string(order));
  const auto init = optimize_witness(moments, order, solve).witness;
  const double s = init.scale();
  const auto scaled = moments.truncated(2 * order).rescaled(s);
  const auto& mu = scaled.values();

  auto ratio = [&](std::span<const double> cs) {
    const auto m = second_order_moments(with_unit_constant(cs), mu);
    const double var = m.second - m.first * m.first;
    if (!(var > 0.0)) return std::numeric_limits<double>::infinity();
    return m.first / std::sqrt(var);
  };
  const auto x0 = init.scaled_coeffs();
  const double init_obj = ratio(x0);
  if (!std::isfinite(init_obj))
    fail(ErrorKind::degenerate_statistic,
         "test function has zero or undefined variance at the linear solution");
  const auto r = nelder_mead(ratio, x0, simplex_steps(x0), options.max_iterations,
                             options.relative_tolerance);
  return finish(init, init_obj, r, order, s);
}

SignificanceOptimization optimize_significance(const QuadratureDataset& data,
                                               const Witness& initial,
                                               const SimplexOptions& options) {
  require_randomized(data);
  const std::size_t n = data.size();
  if (n < 2)
    fail(ErrorKind::insufficient_data,
         "significance optimization needs at least two samples, got " + std::to_string(n));
  const int order = initial.order();
  const double s = initial.scale();
  const auto nn = static_cast<Eigen::Index>(n);
  // Per-sample powers B_{2k} (x/s)^{2k}, k = 1..N.
  Eigen::MatrixXd powers(nn, order);
  std::vector<double> b(static_cast<std::size_t>(order) + 1);
  for (int k = 1; k <= order; ++k) b[static_cast<std::size_t>(k)] = radial_factor(k);
  for (Eigen::Index i = 0; i < nn; ++i) {
    const double x = data.value(static_cast<std::size_t>(i)) / s;
    const double t = x * x;
    double p = 1.0;
    for (int k = 1; k <= order; ++k) {
      p *= t;
      powers(i, k - 1) = b[static_cast<std::size_t>(k)] * p;
    }
  }
  Eigen::VectorXd q(order);
  Eigen::VectorXd f(nn);
  auto ratio = [&](std::span<const double> cs) {
    const auto full = self_convolution(with_unit_constant(cs));
    for (int k = 1; k <= order; ++k) q(k - 1) = full[static_cast<std::size_t>(k)];
    f.noalias() = powers * q;
    const double mean = 1.0 + f.mean();
    const double var = (f.array() - (mean - 1.0)).square().sum() / static_cast<double>(n - 1);
    if (!(var > 0.0)) return std::numeric_limits<double>::infinity();
    return mean / std::sqrt(var);
  };
  const auto x0 = initial.scaled_coeffs();
  const double init_obj = ratio(x0);
  if (!std::isfinite(init_obj))
    fail(ErrorKind::degenerate_statistic,
         "per-sample witness statistic has zero or undefined spread at the starting point");
  const auto r = nelder_mead(ratio, x0, simplex_steps(x0), options.max_iterations,
                             options.relative_tolerance);
  return finish(initial, init_obj, r, order, s);
}

// ---------------------------------------------------------------------------
// Onset, profile, PSD

OnsetResult onset_order(const RadialMomentSet& moments, int n_max, double tol_neg,
                        const OptimizeOptions& options) {
  require(n_max >= 2, "maximum order must be >= 2");
  const int top = n_max - n_max % 2;
  moments.require_k(top, "onset search up to order " + std::to_string(top));
  OnsetResult out;
  for (int n = 2; n <= top; n += 2) {
    OrderOutcome o;
    o.order = n;
    try {
      const auto sol = optimize_witness(moments, n, options);
      o.min_F = sol.min_F;
      o.diagnostics = sol.diagnostics;
      if (!out.onset && sol.min_F < -tol_neg) out.onset = n;
    } catch (const IllConditionedError& e) {
      o.diagnostics = e.diagnostics();
      o.note = e.what();
    }
    out.orders.push_back(std::move(o));
  }
  return out;
}

std::vector<double> witness_profile(const Witness& w, std::span<const double> r_grid) {
  require(!r_grid.empty(), "radial grid is empty");
  std::vector<double> out;
  out.reserve(r_grid.size());
  for (double r : r_grid) {
    require(std::isfinite(r) && r >= 0.0, "radial grid values must be finite and non-negative");
    const double m = w.polynomial(r);
    out.push_back(m * m);
  }
  return out;
}

PsdCheck psd_crosscheck(const RadialMomentSet& moments, int order) {
  const auto scaled = moments.truncated(order).rescaled(radial_scale_of(moments));
  Eigen::MatrixXd s = moment_matrix(scaled, order);
  Eigen::VectorXd d = Eigen::VectorXd::Ones(s.rows());
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    if (s(i, i) > 0.0) d(i) = 1.0 / std::sqrt(s(i, i));
  s = d.asDiagonal() * s * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  PsdCheck out;
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  out.tolerance = 1e-10 * es.eigenvalues().cwiseAbs().maxCoeff();
  out.psd = out.min_eigenvalue >= -out.tolerance;
  return out;
}

}  // namespace qwitness
