#pragma once

#include <functional>
#include <span>
#include <vector>

namespace qwitness {

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Derivative-free Nelder-Mead minimization. Non-finite objective values are
/// treated as +infinity. Converges when the spread of objective values over
/// the simplex falls below `relative_tolerance` times their magnitude.
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> start, std::vector<double> step,
                          int max_iterations, double relative_tolerance);

}  // namespace qwitness
