#include "qwitness/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qwitness/error.hpp"

namespace qwitness {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

}  // namespace

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> start, std::vector<double> step,
                          int max_iterations, double relative_tolerance) {
  const std::size_t dim = start.size();
  require(dim > 0, "nelder_mead: empty start point");
  require(step.size() == dim, "nelder_mead: step size mismatch");

  auto eval = [&](const std::vector<double>& x) {
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> pts(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += step[i];
  std::vector<double> val(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) val[i] = eval(pts[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), trial(dim), trial2(dim);
  auto along = [&](double t, std::vector<double>& out, const std::vector<double>& worst) {
    for (std::size_t j = 0; j < dim; ++j) out[j] = centroid[j] + t * (worst[j] - centroid[j]);
  };

  SimplexResult res;
  int it = 0;
  for (; it < max_iterations; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    const double best = val[order.front()];
    const double worst = val[order.back()];
    if (std::isfinite(worst) &&
        std::fabs(worst - best) <= relative_tolerance * (std::fabs(best) + std::fabs(worst)) * 0.5 +
                                       std::numeric_limits<double>::min()) {
      res.converged = true;
      break;
    }
    const std::size_t w = order.back();
    const std::size_t sw = order[dim - 1];
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += pts[order[i]][j];
    for (double& c : centroid) c /= static_cast<double>(dim);

    along(-kReflect, trial, pts[w]);
    const double fr = eval(trial);
    if (fr < best) {
      along(-kExpand, trial2, pts[w]);
      const double fe = eval(trial2);
      if (fe < fr) {
        pts[w] = trial2;
        val[w] = fe;
      } else {
        pts[w] = trial;
        val[w] = fr;
      }
      continue;
    }
    if (fr < val[sw]) {
      pts[w] = trial;
      val[w] = fr;
      continue;
    }
    // Contraction, outside if the reflected point beat the worst.
    if (fr < worst) {
      along(-kContract, trial2, pts[w]);
      const double fc = eval(trial2);
      if (fc <= fr) {
        pts[w] = trial2;
        val[w] = fc;
        continue;
      }
    } else {
      along(kContract, trial2, pts[w]);
      const double fc = eval(trial2);
      if (fc < worst) {
        pts[w] = trial2;
        val[w] = fc;
        continue;
      }
    }
    const auto& xb = pts[order.front()];
    for (std::size_t i = 1; i <= dim; ++i) {
      auto& p = pts[order[i]];
      for (std::size_t j = 0; j < dim; ++j) p[j] = xb[j] + kShrink * (p[j] - xb[j]);
      val[order[i]] = eval(p);
    }
  }
  const auto best_it = std::min_element(val.begin(), val.end());
  const auto bi = static_cast<std::size_t>(best_it - val.begin());
  res.x = pts[bi];
  res.value = *best_it;
  res.iterations = it;
  return res;
}

}  // namespace qwitness
