#include "qwitness/linalg.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <lapacke.h>

#include "qwitness/error.hpp"

namespace qwitness {

namespace {

Eigen::VectorXd residual_ld(const Eigen::MatrixXd& a, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& b) {
  const auto n = a.rows();
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    long double s = b(i);
    for (Eigen::Index j = 0; j < n; ++j)
      s -= static_cast<long double>(a(i, j)) * static_cast<long double>(x(j));
    r(i) = static_cast<double>(s);
  }
  return r;
}

}  // namespace

double symmetric_condition_number(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const auto abs_ev = es.eigenvalues().cwiseAbs();
  const double lo = abs_ev.minCoeff();
  if (lo == 0.0) return std::numeric_limits<double>::infinity();
  return abs_ev.maxCoeff() / lo;
}

SymmetricSolveResult solve_symmetric(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                     int max_refinement_steps) {
  require(a.rows() == a.cols() && a.rows() == b.size() && a.rows() > 0,
          "solve_symmetric: shape mismatch");
  const auto n = static_cast<lapack_int>(a.rows());
  SymmetricSolveResult out;
  out.condition_number = symmetric_condition_number(a);

  Eigen::MatrixXd factor = a;  // column major, lower triangle used
  std::vector<lapack_int> ipiv(static_cast<std::size_t>(n));
  const lapack_int info =
      LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n, factor.data(), n, ipiv.data());
  if (info != 0) {
    out.singular = true;
    out.x = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
    out.residual = std::numeric_limits<double>::infinity();
    return out;
  }
  auto apply_inverse = [&](Eigen::VectorXd v) {
    LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', n, 1, factor.data(), n, ipiv.data(), v.data(), n);
    return v;
  };

  const double bnorm = b.norm();
  Eigen::VectorXd x = apply_inverse(b);
  Eigen::VectorXd r = residual_ld(a, x, b);
  double res = bnorm > 0.0 ? r.norm() / bnorm : r.norm();
  for (int step = 0; step < max_refinement_steps && res > 0.0; ++step) {
    Eigen::VectorXd x_next = x + apply_inverse(r);
    Eigen::VectorXd r_next = residual_ld(a, x_next, b);
    const double res_next = bnorm > 0.0 ? r_next.norm() / bnorm : r_next.norm();
    if (!(res_next < res)) break;
    x = std::move(x_next);
    r = std::move(r_next);
    res = res_next;
    ++out.refinement_steps;
  }
  out.x = std::move(x);
  out.residual = res;
  if (!std::isfinite(res) || !out.x.allFinite()) out.singular = true;
  return out;
}

}  // namespace qwitness
