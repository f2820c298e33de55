#pragma once

#include <Eigen/Dense>

namespace qwitness {

struct SymmetricSolveResult {
  Eigen::VectorXd x;
  /// ||A x - b|| / ||b||, residual evaluated in extended precision.
  double residual = 0.0;
  /// max|lambda| / min|lambda| of A.
  double condition_number = 0.0;
  int refinement_steps = 0;
  bool singular = false;
};

/// Solves A x = b for symmetric, possibly indefinite A using a Bunch-Kaufman
/// LDL^T factorization followed by iterative refinement with residuals
/// accumulated in long double. Never throws on singular input; the caller
/// inspects `singular` and `condition_number`.
SymmetricSolveResult solve_symmetric(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                     int max_refinement_steps = 10);

/// Condition number from the symmetric eigenvalues (infinity when singular).
double symmetric_condition_number(const Eigen::MatrixXd& a);

}  // namespace qwitness
