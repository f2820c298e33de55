#include "qwitness/numeric.hpp"

#include <limits>
#include <string>

#include "qwitness/error.hpp"

namespace qwitness {

namespace {

uint128 gcd128(uint128 a, uint128 b) {
  while (b != 0) {
    const auto t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

Rational make_rational(uint128 num, uint128 den) {
  require(den != 0, "rational with zero denominator");
  const auto g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  constexpr auto cap = std::numeric_limits<std::uint64_t>::max();
  if (num > cap || den > cap) fail(ErrorKind::invalid_argument, "rational overflows 64 bits");
  return {static_cast<std::uint64_t>(num), static_cast<std::uint64_t>(den)};
}

Rational operator*(const Rational& a, const Rational& b) {
  return make_rational(static_cast<uint128>(a.num) * b.num,
                       static_cast<uint128>(a.den) * b.den);
}

std::uint64_t central_binomial(int n) {
  require(n >= 0 && n <= 33, "central_binomial: n out of exact range [0, 33], got " +
                                 std::to_string(n));
  uint128 c = 1;
  for (int k = 1; k <= n; ++k) c = c * static_cast<unsigned>(n + k) / static_cast<unsigned>(k);
  return static_cast<std::uint64_t>(c);
}

Rational radial_factor_exact(int k) {
  require(k >= 0 && k <= 31, "radial_factor_exact: k out of exact range [0, 31]");
  const uint128 pow4 = static_cast<uint128>(1) << (2 * k);
  return make_rational(pow4, central_binomial(k));
}

double radial_factor(int k) {
  require(k >= 0, "radial_factor: negative order");
  if (k <= 31) return radial_factor_exact(k).value();
  // 4^k / C(2k,k) = prod_{i=1..k} 2i / (2i - 1)
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b *= (2.0 * i) / (2.0 * i - 1.0);
  return b;
}

double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

}  // namespace qwitness
