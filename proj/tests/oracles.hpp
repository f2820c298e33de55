#pragma once

// Test-only reference computations, independent of the library's numerical
// paths: exact rational linear algebra and adaptive quadrature of the
// analytic phase-space densities.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "qwitness/states.hpp"

namespace oracle {

using rational = boost::multiprecision::cpp_rational;

inline rational factorial(int k) {
  rational f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

/// mu[k] = k!(1 + 2 eta k) with eta = eta_num / eta_den, exactly.
inline std::vector<rational> fock_moments(int max_k, long eta_num, long eta_den) {
  std::vector<rational> mu(static_cast<std::size_t>(max_k) + 1);
  const rational eta(eta_num, eta_den);
  for (int k = 0; k <= max_k; ++k) mu[static_cast<std::size_t>(k)] = factorial(k) * (1 + 2 * eta * k);
  return mu;
}

struct ExactWitness {
  std::vector<rational> coeffs;  // C_{2l}, l = 1..N/2
  rational min_F;
};

/// Solves sum_l mu[l+j] C_l = -mu[j] by exact Gaussian elimination and
/// returns the minimized <M^2> = c^T S c.
inline ExactWitness exact_witness(const std::vector<rational>& mu, int order) {
  const int h = order / 2;
  std::vector<std::vector<rational>> a(static_cast<std::size_t>(h),
                                       std::vector<rational>(static_cast<std::size_t>(h) + 1));
  for (int j = 1; j <= h; ++j) {
    for (int l = 1; l <= h; ++l) a[j - 1][l - 1] = mu[static_cast<std::size_t>(j + l)];
    a[j - 1][h] = -mu[static_cast<std::size_t>(j)];
  }
  for (int col = 0; col < h; ++col) {
    int piv = col;
    while (a[piv][col] == 0) ++piv;
    std::swap(a[piv], a[col]);
    for (int r = 0; r < h; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const rational f = a[r][col] / a[col][col];
      for (int c = col; c <= h; ++c) a[r][c] -= f * a[col][c];
    }
  }
  ExactWitness w;
  std::vector<rational> c(static_cast<std::size_t>(h) + 1);
  c[0] = 1;
  for (int j = 0; j < h; ++j) {
    c[j + 1] = a[j][h] / a[j][j];
    w.coeffs.push_back(c[j + 1]);
  }
  rational f = 0;
  for (int j = 0; j <= h; ++j)
    for (int l = 0; l <= h; ++l) f += c[j] * c[l] * mu[static_cast<std::size_t>(j + l)];
  w.min_F = f;
  return w;
}

inline double to_double(const rational& r) { return static_cast<double>(r); }

/// int_0^inf 2 pi r W(r) g(r) dr by adaptive Gauss-Kronrod.
template <class G>
double radial_integral(const qwitness::StateSpec& s, G g) {
  using boost::math::quadrature::gauss_kronrod;
  auto f = [&](double r) { return 2.0 * std::numbers::pi * r * qwitness::wigner_radial(s, r) * g(r); };
  // Split at a few radii so the oscillating Laguerre-type integrands resolve.
  const double cuts[] = {0.0, 1.0, 2.0, 4.0, 8.0};
  double total = 0.0;
  for (int i = 0; i + 1 < 5; ++i)
    total += gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 12, 1e-13);
  total += gauss_kronrod<double, 61>::integrate(f, 8.0, std::numeric_limits<double>::infinity(),
                                                12, 1e-13);
  return total;
}

inline double radial_moment(const qwitness::StateSpec& s, int k) {
  return radial_integral(s, [k](double r) { return std::pow(r, 2 * k); });
}

/// int x^{2k} marginal(x) dx over the real line.
inline double marginal_moment(const qwitness::StateSpec& s, int k) {
  using boost::math::quadrature::gauss_kronrod;
  auto f = [&](double x) { return std::pow(x, 2 * k) * qwitness::marginal_pdf(s, x); };
  const double cuts[] = {0.0, 1.0, 2.0, 4.0, 8.0};
  double half = 0.0;
  for (int i = 0; i + 1 < 5; ++i)
    half += gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 12, 1e-13);
  half += gauss_kronrod<double, 61>::integrate(f, 8.0, std::numeric_limits<double>::infinity(), 12,
                                               1e-13);
  return 2.0 * half;
}

/// Marginal CDF by cumulative Gauss-Kronrod integration of marginal_pdf over
/// the cells of a fine grid, linearly interpolated between nodes.
class TabulatedCdf {
 public:
  TabulatedCdf(const qwitness::StateSpec& s, double lo, double hi, double h) : lo_(lo), h_(h) {
    using boost::math::quadrature::gauss_kronrod;
    auto pdf = [&](double x) { return qwitness::marginal_pdf(s, x); };
    double acc = gauss_kronrod<double, 61>::integrate(pdf, -std::numeric_limits<double>::infinity(),
                                                      lo, 10, 1e-13);
    table_.push_back(acc);
    for (double x = lo; x < hi - 0.5 * h; x += h) {
      acc += gauss_kronrod<double, 15>::integrate(pdf, x, x + h, 0, 0.0);
      table_.push_back(acc);
    }
  }

  double operator()(double x) const {
    const double u = (x - lo_) / h_;
    if (u <= 0.0) return table_.front() * std::max(0.0, 1.0 + u);
    const auto i = static_cast<std::size_t>(u);
    if (i + 1 >= table_.size()) return table_.back();
    const double t = u - static_cast<double>(i);
    return (1.0 - t) * table_[i] + t * table_[i + 1];
  }

 private:
  double lo_, h_;
  std::vector<double> table_;
};

/// Kolmogorov-Smirnov distance between a sample and the state's marginal.
inline double ks_statistic(const qwitness::StateSpec& s, std::vector<double> xs) {
  const TabulatedCdf cdf(s, -12.0, 12.0, 0.005);
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// 1% critical value of the one-sample KS statistic (asymptotic).
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

}  // namespace oracle
