#include "qwitness/dataset.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qwitness/error.hpp"

namespace qwitness {

std::string_view to_string(PhaseMode mode) noexcept {
  return mode == PhaseMode::tagged ? "tagged" : "randomized";
}

PhaseMode phase_mode_from_string(std::string_view s) {
  if (s == "randomized") return PhaseMode::randomized;
  if (s == "tagged") return PhaseMode::tagged;
  fail(ErrorKind::invalid_argument, "unknown phase mode '" + std::string(s) + "'");
}

namespace {

void check_values(const std::vector<double>& values, double convention_variance) {
  require(!values.empty(), "quadrature dataset is empty");
  require(std::isfinite(convention_variance) && convention_variance > 0.0,
          "convention variance must be a positive finite number");
  for (std::size_t i = 0; i < values.size(); ++i)
    require(std::isfinite(values[i]), "quadrature sample " + std::to_string(i) + " is not finite");
}

}  // namespace

QuadratureDataset QuadratureDataset::randomized(std::vector<double> values,
                                                double convention_variance) {
  check_values(values, convention_variance);
  auto store = std::make_shared<Store>();
  store->values = std::move(values);
  store->convention_variance = convention_variance;
  store->factor = std::sqrt(kVacuumVariance / convention_variance);
  return QuadratureDataset(std::move(store), PhaseMode::randomized);
}

QuadratureDataset QuadratureDataset::tagged(std::vector<double> values, std::vector<double> phases,
                                            double convention_variance) {
  check_values(values, convention_variance);
  require(phases.size() == values.size(), "phase count does not match sample count");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    require(std::isfinite(phases[i]), "phase of sample " + std::to_string(i) + " is not finite");
    double p = std::fmod(phases[i], two_pi);
    if (p < 0.0) p += two_pi;
    if (p >= two_pi) p = 0.0;
    phases[i] = p;
  }
  auto store = std::make_shared<Store>();
  store->values = std::move(values);
  store->phases = std::move(phases);
  store->convention_variance = convention_variance;
  store->factor = std::sqrt(kVacuumVariance / convention_variance);
  return QuadratureDataset(std::move(store), PhaseMode::tagged);
}

std::vector<double> QuadratureDataset::values() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = value(i);
  return out;
}

double QuadratureDataset::phase(std::size_t i) const {
  require(mode_ == PhaseMode::tagged, "phase requested from a randomized-phase dataset");
  return store_->phases[i];
}

std::span<const double> QuadratureDataset::phases() const {
  require(mode_ == PhaseMode::tagged, "phases requested from a randomized-phase dataset");
  return store_->phases;
}

QuadratureDataset QuadratureDataset::select(std::span<const std::size_t> indices) const {
  require(!indices.empty(), "empty selection");
  std::vector<double> v;
  v.reserve(indices.size());
  for (auto i : indices) {
    require(i < size(), "selection index out of range");
    v.push_back(store_->values[i]);
  }
  if (mode_ == PhaseMode::randomized)
    return randomized(std::move(v), store_->convention_variance);
  std::vector<double> p;
  p.reserve(indices.size());
  for (auto i : indices) p.push_back(store_->phases[i]);
  return tagged(std::move(v), std::move(p), store_->convention_variance);
}

}  // namespace qwitness
