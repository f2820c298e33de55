#pragma once

#include <string_view>

#include "qwitness/moments.hpp"

namespace qwitness {

enum class StateKind { fock_mixture, thermal, coherent_phase_averaged };

std::string_view to_string(StateKind kind) noexcept;
StateKind state_kind_from_string(std::string_view s);

/// Analytic reference state, all in the vacuum-variance-1/2 convention.
///
///  - fock_mixture: (1 - eta)|0><0| + eta|1><1|
///  - thermal: mean photon number nbar
///  - coherent_phase_averaged: |alpha> averaged over its phase, |alpha|^2 = alpha_sq
class StateSpec {
 public:
  static StateSpec fock_mixture(double eta);
  static StateSpec thermal(double nbar);
  static StateSpec coherent_phase_averaged(double alpha_sq);

  StateKind kind() const noexcept { return kind_; }
  /// The one parameter of the kind: eta, nbar, or |alpha|^2.
  double parameter() const noexcept { return param_; }

  double eta() const;
  double nbar() const;
  double alpha_sq() const;

  friend bool operator==(const StateSpec&, const StateSpec&) = default;

 private:
  StateSpec(StateKind kind, double param) : kind_(kind), param_(param) {}
  StateKind kind_;
  double param_;
};

/// Exact radial moments mu[k] = <r^{2k}>, k = 0..max_k.
///   fock_mixture: k! (1 + 2 eta k)
///   thermal: k! (2 nbar + 1)^k
///   coherent_phase_averaged: k! L_k(-2|alpha|^2)
RadialMomentSet oracle_radial_moments(const StateSpec& s, int max_k);

/// Wigner function at phase-space radius r (rotationally invariant states).
double wigner_radial(const StateSpec& s, double r);

/// Quadrature marginal density at x.
double marginal_pdf(const StateSpec& s, double x);

/// Quadrature marginal CDF at x: erfc forms for the Fock mixture and thermal
/// states, a phase average of erfc for the coherent state.
double marginal_cdf(const StateSpec& s, double x);

}  // namespace qwitness
