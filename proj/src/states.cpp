#include "qwitness/states.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qwitness/error.hpp"

namespace qwitness {

std::string_view to_string(StateKind kind) noexcept {
  switch (kind) {
    case StateKind::fock_mixture: return "fock_mixture";
    case StateKind::thermal: return "thermal";
    case StateKind::coherent_phase_averaged: return "coherent_phase_averaged";
  }
  return "unknown";
}

StateKind state_kind_from_string(std::string_view s) {
  if (s == "fock_mixture") return StateKind::fock_mixture;
  if (s == "thermal") return StateKind::thermal;
  if (s == "coherent_phase_averaged") return StateKind::coherent_phase_averaged;
  fail(ErrorKind::invalid_argument, "unknown state kind '" + std::string(s) + "'");
}

StateSpec StateSpec::fock_mixture(double eta) {
  require(std::isfinite(eta) && eta >= 0.0 && eta <= 1.0,
          "single-photon fraction eta must lie in [0, 1], got " + std::to_string(eta));
  return {StateKind::fock_mixture, eta};
}

StateSpec StateSpec::thermal(double nbar) {
  require(std::isfinite(nbar) && nbar >= 0.0,
          "thermal mean photon number must be finite and >= 0, got " + std::to_string(nbar));
  return {StateKind::thermal, nbar};
}

StateSpec StateSpec::coherent_phase_averaged(double alpha_sq) {
  require(std::isfinite(alpha_sq) && alpha_sq >= 0.0,
          "coherent amplitude |alpha|^2 must be finite and >= 0, got " + std::to_string(alpha_sq));
  return {StateKind::coherent_phase_averaged, alpha_sq};
}

double StateSpec::eta() const {
  require(kind_ == StateKind::fock_mixture, "eta is only defined for fock_mixture states");
  return param_;
}

double StateSpec::nbar() const {
  require(kind_ == StateKind::thermal, "nbar is only defined for thermal states");
  return param_;
}

double StateSpec::alpha_sq() const {
  require(kind_ == StateKind::coherent_phase_averaged,
          "alpha_sq is only defined for coherent_phase_averaged states");
  return param_;
}

RadialMomentSet oracle_radial_moments(const StateSpec& s, int max_k) {
  require(max_k >= 1, "oracle moments need K >= 1");
  std::vector<double> mu(static_cast<std::size_t>(max_k) + 1, 1.0);
  long double fact = 1.0L;
  for (int k = 1; k <= max_k; ++k) {
    fact *= k;
    long double v = 0.0L;
    switch (s.kind()) {
      case StateKind::fock_mixture:
        v = fact * (1.0L + 2.0L * s.parameter() * k);
        break;
      case StateKind::thermal:
        v = fact * std::pow(2.0L * s.parameter() + 1.0L, static_cast<long double>(k));
        break;
      case StateKind::coherent_phase_averaged: {
        // k! L_k(-lambda) = sum_j C(k,j) k!/j! lambda^j, all terms positive.
        const long double lambda = 2.0L * s.parameter();
        long double term = fact;  // j = 0
        long double sum = term;
        for (int j = 1; j <= k; ++j) {
          term *= lambda * static_cast<long double>(k - j + 1) / (static_cast<long double>(j) * j);
          sum += term;
        }
        v = sum;
        break;
      }
    }
    if (!std::isfinite(static_cast<double>(v)))
      fail(ErrorKind::oracle_precision,
           "oracle moment <r^" + std::to_string(2 * k) + "> overflows double precision");
    mu[static_cast<std::size_t>(k)] = static_cast<double>(v);
  }
  return RadialMomentSet(std::move(mu), MomentSource::oracle);
}

double wigner_radial(const StateSpec& s, double r) {
  require(std::isfinite(r) && r >= 0.0, "radius must be finite and non-negative");
  const double r2 = r * r;
  switch (s.kind()) {
    case StateKind::fock_mixture: {
      const double eta = s.parameter();
      return std::exp(-r2) * (1.0 - 2.0 * eta + 2.0 * eta * r2) / std::numbers::pi;
    }
    case StateKind::thermal: {
      const double v = 2.0 * s.parameter() + 1.0;
      return std::exp(-r2 / v) / (std::numbers::pi * v);
    }
    case StateKind::coherent_phase_averaged: {
      // Angular average of exp(-|z - beta|^2)/pi with |beta| = b:
      // exp(-(r - b)^2) * I0(2 r b) exp(-2 r b) / pi.
      const double b = std::sqrt(2.0 * s.parameter());
      const double z = 2.0 * r * b;
      const double scaled_i0 = z < 600.0 ? std::cyl_bessel_i(0.0, z) * std::exp(-z)
                                         : 1.0 / std::sqrt(2.0 * std::numbers::pi * z);
      return std::exp(-(r - b) * (r - b)) * scaled_i0 / std::numbers::pi;
    }
  }
  return 0.0;
}

namespace {

// Periodic trapezoid rule for (1/pi) int_0^pi g(cos theta) dTheta. Doubles the
// node count until successive estimates agree to `rel_tol`.
template <class G>
double phase_average(G g, double rel_tol, const char* what, double x) {
  auto rule = [&](int m) {
    long double s = 0.0L;
    for (int i = 0; i <= m; ++i) {
      const double w = (i == 0 || i == m) ? 0.5 : 1.0;
      s += w * g(std::cos(std::numbers::pi * i / m));
    }
    return static_cast<double>(s / m);
  };
  double prev = rule(16);
  for (int m = 32; m <= 8192; m *= 2) {
    const double cur = rule(m);
    if (std::fabs(cur - prev) <= rel_tol * std::fabs(cur) ||
        std::fabs(cur) < std::numeric_limits<double>::min())
      return cur;
    prev = cur;
  }
  fail(ErrorKind::oracle_precision,
       std::string(what) + " did not converge at x = " + std::to_string(x));
}

// exp(-d^2) loses about d^2 ulps to rounding of its argument.
double trapezoid_tolerance(double x, double b) {
  const double reach = std::fabs(x) + b;
  return 1e-14 + 8.0 * std::numeric_limits<double>::epsilon() * reach * reach;
}

}  // namespace

double marginal_pdf(const StateSpec& s, double x) {
  require(std::isfinite(x), "quadrature value must be finite");
  const double x2 = x * x;
  const double norm = 1.0 / std::sqrt(std::numbers::pi);
  switch (s.kind()) {
    case StateKind::fock_mixture: {
      const double eta = s.parameter();
      return std::exp(-x2) * (1.0 - eta + 2.0 * eta * x2) * norm;
    }
    case StateKind::thermal: {
      const double v = 2.0 * s.parameter() + 1.0;  // twice the variance
      return std::exp(-x2 / v) / std::sqrt(std::numbers::pi * v);
    }
    case StateKind::coherent_phase_averaged: {
      // Phase average of vacuum-variance Gaussians centered at b cos(theta).
      const double b = std::sqrt(2.0 * s.parameter());
      if (b == 0.0) return norm * std::exp(-x2);
      return norm * phase_average(
                        [&](double c) {
                          const double d = x - b * c;
                          return std::exp(-d * d);
                        },
                        trapezoid_tolerance(x, b), "phase-averaged coherent marginal", x);
    }
  }
  return 0.0;
}

double marginal_cdf(const StateSpec& s, double x) {
  require(std::isfinite(x), "quadrature value must be finite");
  // Every marginal here is even; evaluate the lower tail at -|x| and reflect.
  const double t = -std::fabs(x);
  double lower = 0.0;
  switch (s.kind()) {
    case StateKind::fock_mixture:
      // Single-photon part: erfc(-t)/2 - t exp(-t^2)/sqrt(pi).
      lower = 0.5 * std::erfc(-t) -
              s.parameter() * t * std::exp(-t * t) / std::sqrt(std::numbers::pi);
      break;
    case StateKind::thermal:
      lower = 0.5 * std::erfc(-t / std::sqrt(2.0 * s.parameter() + 1.0));
      break;
    case StateKind::coherent_phase_averaged: {
      const double b = std::sqrt(2.0 * s.parameter());
      lower = phase_average([&](double c) { return 0.5 * std::erfc(b * c - t); },
                            trapezoid_tolerance(t, b), "phase-averaged coherent CDF", x);
      break;
    }
  }
  return x <= 0.0 ? lower : 1.0 - lower;
}

}  // namespace qwitness
