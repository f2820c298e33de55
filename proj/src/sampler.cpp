#include "qwitness/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include "qwitness/error.hpp"
#include "qwitness/rng.hpp"

namespace qwitness {

namespace {

const double kVacuumSigma = std::sqrt(kVacuumVariance);

void fill_chunk(const StateSpec& s, std::uint64_t seed, std::size_t chunk, double* x,
                double* phase, std::size_t count) {
  auto eng = make_engine(seed, chunk);
  boost::random::normal_distribution<double> gauss(0.0, 1.0);
  boost::random::gamma_distribution<double> gamma32(1.5, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    double v = 0.0;
    switch (s.kind()) {
      case StateKind::fock_mixture:
        if (uniform01(eng) < s.parameter()) {
          // Single-photon marginal (2/sqrt(pi)) x^2 exp(-x^2): x^2 ~ Gamma(3/2, 1).
          const double mag = std::sqrt(gamma32(eng));
          v = (eng() >> 63) != 0 ? -mag : mag;
        } else {
          v = kVacuumSigma * gauss(eng);
        }
        break;
      case StateKind::thermal:
        v = std::sqrt(s.parameter() + 0.5) * gauss(eng);
        break;
      case StateKind::coherent_phase_averaged: {
        const double th = 2.0 * std::numbers::pi * uniform01(eng);
        v = std::sqrt(2.0 * s.parameter()) * std::cos(th) + kVacuumSigma * gauss(eng);
        break;
      }
    }
    x[i] = v;
    if (phase != nullptr) phase[i] = std::numbers::pi * uniform01(eng);
  }
}

}  // namespace

QuadratureDataset sample(const StateSpec& s, std::size_t n, std::uint64_t seed, PhaseMode mode,
                         unsigned threads) {
  require(n >= 1, "sample count must be >= 1");
  std::vector<double> x(n);
  std::vector<double> ph(mode == PhaseMode::tagged ? n : 0);
  const std::size_t nchunks = (n + kSamplerChunk - 1) / kSamplerChunk;
  auto run = [&](std::size_t first, std::size_t stride) {
    for (std::size_t c = first; c < nchunks; c += stride) {
      const std::size_t b = c * kSamplerChunk;
      const std::size_t cnt = std::min(kSamplerChunk, n - b);
      fill_chunk(s, seed, c, x.data() + b, ph.empty() ? nullptr : ph.data() + b, cnt);
    }
  };
  if (threads <= 1 || nchunks <= 1) {
    run(0, 1);
  } else {
    const auto t = std::min<std::size_t>(threads, nchunks);
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < t; ++i) pool.emplace_back([&, i] { run(i, t); });
  }
  if (mode == PhaseMode::tagged) return QuadratureDataset::tagged(std::move(x), std::move(ph));
  return QuadratureDataset::randomized(std::move(x));
}

}  // namespace qwitness
