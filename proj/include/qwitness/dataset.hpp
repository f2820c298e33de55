#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace qwitness {

/// Quadrature variance of the vacuum in the library's fixed convention.
/// With this choice the vacuum has <r^2> = 1 and <r^{2k}> = k!.
inline constexpr double kVacuumVariance = 0.5;

enum class PhaseMode { randomized, tagged };

std::string_view to_string(PhaseMode mode) noexcept;
PhaseMode phase_mode_from_string(std::string_view s);

/// Immutable set of measured quadrature amplitudes.
///
/// Values are stored as imported. `convention_variance` is the vacuum
/// variance of the source data; `value(i)` returns amplitudes rescaled to the
/// library convention (vacuum variance 1/2). Copies share storage.
class QuadratureDataset {
 public:
  /// Randomized-phase dataset. Throws invalid_argument if empty or any value
  /// is not finite.
  static QuadratureDataset randomized(std::vector<double> values,
                                      double convention_variance = kVacuumVariance);

  /// Phase-tagged dataset. Phases are reduced into [0, 2pi).
  static QuadratureDataset tagged(std::vector<double> values, std::vector<double> phases,
                                  double convention_variance = kVacuumVariance);

  std::size_t size() const noexcept { return store_->values.size(); }
  PhaseMode phase_mode() const noexcept { return mode_; }
  double convention_variance() const noexcept { return store_->convention_variance; }

  /// Multiplier applied to raw values to reach the library convention.
  double convention_factor() const noexcept { return store_->factor; }

  double value(std::size_t i) const noexcept { return store_->values[i] * store_->factor; }
  double raw_value(std::size_t i) const noexcept { return store_->values[i]; }
  std::span<const double> raw_values() const noexcept { return store_->values; }

  /// Values in the library convention, materialized.
  std::vector<double> values() const;

  /// Phase of sample i. Only valid for tagged datasets.
  double phase(std::size_t i) const;
  std::span<const double> phases() const;

  /// Sub-dataset built from the given sample indices (used by train/test
  /// splitting and bootstrap resampling).
  QuadratureDataset select(std::span<const std::size_t> indices) const;

 private:
  struct Store {
    std::vector<double> values;
    std::vector<double> phases;
    double convention_variance = kVacuumVariance;
    double factor = 1.0;
  };

  QuadratureDataset(std::shared_ptr<const Store> store, PhaseMode mode)
      : store_(std::move(store)), mode_(mode) {}

  std::shared_ptr<const Store> store_;
  PhaseMode mode_;
};

}  // namespace qwitness
