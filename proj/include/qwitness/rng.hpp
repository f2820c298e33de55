#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qwitness {

/// Name of the generator recorded in reports and CSV provenance.
inline constexpr std::string_view kGeneratorName =
    "mt19937_64; substream seed = splitmix64(master_seed + 0x9e3779b97f4a7c15 * (stream + 1))";

/// One SplitMix64 step.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Engine for substream `stream` of `master_seed`. std::mt19937_64 output is
/// fixed by the standard, so streams are portable across toolchains.
inline std::mt19937_64 make_engine(std::uint64_t master_seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(master_seed + 0x9e3779b97f4a7c15ULL * (stream + 1)));
}

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace qwitness
