#pragma once

#include <cstdint>

#include "twinbeam/channel.hpp"

namespace twinbeam {

/// Post-channel stages seen by the sampled photocurrents.
struct McDetection {
  double probe_transmission = 1.0;
  double efficiency = 1.0;
};

struct McEstimate {
  double nsf = 0.0;
  /// Standard error of `nsf` for Gaussian-distributed photocurrent differences.
  double standard_error = 0.0;
  std::int64_t samples = 0;
};

inline constexpr std::int64_t kMinMcSamples = 10'000;
/// Samples per independently seeded chunk. Fixed so that results do not depend
/// on the number of worker threads.
inline constexpr std::int64_t kMcChunkSize = 8192;

/// Monte-Carlo estimate of the intensity-difference NSF.
///
/// Draws Wigner samples of the complex field amplitudes (vacuum fluctuations of
/// variance 1/4 per quadrature of a), pushes them through the Bogoliubov and
/// beam-splitter maps acting on the amplitudes themselves, and evaluates
/// Var(|a_p|^2 - |a_c|^2) / <|a_p|^2 + |a_c|^2>. Shares no code with the
/// covariance propagation. Bias is O(1/|seed|^2).
///
/// Chunk k is seeded from (rng_seed, k) through std::seed_seq; chunk statistics
/// are merged in chunk order, so the result is bit-identical for any thread count.
McEstimate mc_nsf_oracle(const TwinBeamScenario& scenario, std::int64_t samples,
                         std::uint64_t rng_seed, const McDetection& detection = {});

namespace serial {
/// Single-threaded reference of mc_nsf_oracle with the same chunk decomposition.
McEstimate mc_nsf_oracle(const TwinBeamScenario& scenario, std::int64_t samples,
                         std::uint64_t rng_seed, const McDetection& detection = {});
}  // namespace serial

}  // namespace twinbeam
