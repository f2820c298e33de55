#pragma once

#include <cstddef>
#include <cstdint>

#include "qwitness/dataset.hpp"
#include "qwitness/states.hpp"

namespace qwitness {

/// Samples per RNG substream. Chunk c of a dataset is drawn from substream c
/// of the master seed, so datasets are identical however they are generated.
inline constexpr std::size_t kSamplerChunk = 16384;

/// Synthetic homodyne record of `n` i.i.d. quadratures distributed as
/// marginal_pdf(s). In tagged mode each sample also carries a uniform phase
/// in [0, pi). Deterministic in (s, n, seed, mode).
QuadratureDataset sample(const StateSpec& s, std::size_t n, std::uint64_t seed,
                         PhaseMode mode = PhaseMode::randomized, unsigned threads = 1);

}  // namespace qwitness
