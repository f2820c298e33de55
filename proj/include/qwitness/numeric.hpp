#pragma once

#include <cmath>
#include <cstdint>
#include <span>

namespace qwitness {

__extension__ typedef unsigned __int128 uint128;

/// Neumaier's variant of Kahan summation. Every moment accumulation in the
/// library goes through this type.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }

  void add(const CompensatedSum& other) noexcept {
    add(other.sum_);
    add(other.comp_);
  }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Exact non-negative rational number, always stored in lowest terms.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const noexcept {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  friend bool operator==(const Rational&, const Rational&) = default;
};

Rational make_rational(uint128 num, uint128 den);
Rational operator*(const Rational& a, const Rational& b);

/// Binomial coefficient (2n choose n), exact for n <= 33.
std::uint64_t central_binomial(int n);

/// Factor B_{2k} = 4^k / (2k choose k) relating <x^{2k}> of a rotationally
/// invariant state to its radial moment <r^{2k}>. Exact for k <= 31.
Rational radial_factor_exact(int k);

/// Floating-point B_{2k} for any k >= 0, accurate to a few ulp.
double radial_factor(int k);

/// sum_i x_i over a span, compensated.
double compensated_sum(std::span<const double> xs) noexcept;

}  // namespace qwitness
