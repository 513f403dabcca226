#include "twinbeam/mc_oracle.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <omp.h>

#include "twinbeam/error.hpp"

namespace twinbeam {

namespace {

using cplx = std::complex<double>;

// Welford accumulator for D = N_p - N_c plus a running sum of N_p + N_c.
struct ChunkStats {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double total_sum = 0.0;

  void add(double d, double total) {
    ++n;
    const double delta = d - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (d - mean);
    total_sum += total;
  }

  void merge(const ChunkStats& o) {
    if (o.n == 0) return;
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(o.n);
    const double delta = o.mean - mean;
    const double nt = na + nb;
    mean += delta * nb / nt;
    m2 += o.m2 + delta * delta * na * nb / nt;
    n += o.n;
    total_sum += o.total_sum;
  }
};

class FieldSampler {
 public:
  FieldSampler(std::uint64_t rng_seed, std::uint64_t chunk) {
    std::seed_seq seq{static_cast<std::uint32_t>(rng_seed), static_cast<std::uint32_t>(rng_seed >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
    engine_.seed(seq);
  }

  // Vacuum amplitude: X and P of unit variance, a = (X + iP)/2.
  cplx vacuum() {
    const double x = normal_(engine_);
    const double p = normal_(engine_);
    return {0.5 * x, 0.5 * p};
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

struct Amplitudes {
  cplx probe;
  cplx conj;
};

void squeeze(Amplitudes& a, double gain) {
  const double u = std::sqrt(gain);
  const double v = std::sqrt(gain - 1.0);
  const cplx p = u * a.probe + v * std::conj(a.conj);
  const cplx c = u * a.conj + v * std::conj(a.probe);
  a.probe = p;
  a.conj = c;
}

void attenuate(cplx& a, double eta, FieldSampler& rng) {
  a = std::sqrt(eta) * a + std::sqrt(1.0 - eta) * rng.vacuum();
}

struct ChannelVisitor {
  Amplitudes& a;
  FieldSampler& rng;

  void operator()(const SqueezerSpec& s) const { squeeze(a, s.gain); }

  void operator()(const LumpedChannelSpec& s) const {
    if (s.placement == LossPlacement::loss_before_gain) {
      attenuate(a.probe, s.eta_probe, rng);
      squeeze(a, s.gain);
    } else {
      squeeze(a, s.gain);
      attenuate(a.probe, s.eta_probe, rng);
      attenuate(a.conj, s.eta_conj, rng);
    }
  }

  void operator()(const CascadeSpec& s) const {
    const double n = static_cast<double>(s.steps);
    const double step_gain = std::pow(std::cosh(s.gamma_total / n), 2);
    const double tp = std::exp(-s.alpha_probe_total / (2.0 * n));
    const double tc = std::exp(-s.alpha_conj_total / (2.0 * n));
    for (int k = 0; k < s.steps; ++k) {
      attenuate(a.probe, tp, rng);
      attenuate(a.conj, tc, rng);
      squeeze(a, step_gain);
      attenuate(a.probe, tp, rng);
      attenuate(a.conj, tc, rng);
    }
  }
};

ChunkStats run_chunk(const TwinBeamScenario& scenario, const McDetection& det,
                     std::uint64_t rng_seed, std::int64_t chunk, std::int64_t count) {
  FieldSampler rng(rng_seed, static_cast<std::uint64_t>(chunk));
  ChunkStats stats;
  for (std::int64_t i = 0; i < count; ++i) {
    Amplitudes a{scenario.seed_probe + rng.vacuum(), scenario.seed_conj + rng.vacuum()};
    std::visit(ChannelVisitor{a, rng}, scenario.channel);
    attenuate(a.probe, det.probe_transmission, rng);
    attenuate(a.probe, det.efficiency, rng);
    attenuate(a.conj, det.efficiency, rng);
    const double np = std::norm(a.probe);
    const double nc = std::norm(a.conj);
    stats.add(np - nc, np + nc);
  }
  return stats;
}

void check_inputs(const TwinBeamScenario& scenario, std::int64_t samples, const McDetection& det) {
  if (samples < kMinMcSamples) throw ValidationError("Monte-Carlo oracle needs at least 1e4 samples");
  validate(scenario.channel);
  const auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!unit(det.probe_transmission) || !unit(det.efficiency))
    throw DomainError("Monte-Carlo detection transmissions must lie in [0, 1]");
}

McEstimate finish(const std::vector<ChunkStats>& chunks) {
  ChunkStats all;
  for (const auto& c : chunks) all.merge(c);
  const double n = static_cast<double>(all.n);
  const double var = all.m2 / (n - 1.0);
  const double nsf = var / (all.total_sum / n);
  return {nsf, nsf * std::sqrt(2.0 / (n - 1.0)), all.n};
}

std::int64_t chunk_count(std::int64_t samples) { return (samples + kMcChunkSize - 1) / kMcChunkSize; }

std::int64_t chunk_length(std::int64_t samples, std::int64_t k) {
  return std::min(kMcChunkSize, samples - k * kMcChunkSize);
}

}  // namespace

McEstimate mc_nsf_oracle(const TwinBeamScenario& scenario, std::int64_t samples,
                         std::uint64_t rng_seed, const McDetection& detection) {
  check_inputs(scenario, samples, detection);
  const std::int64_t chunks = chunk_count(samples);
  std::vector<ChunkStats> stats(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < chunks; ++k)
    stats[static_cast<std::size_t>(k)] =
        run_chunk(scenario, detection, rng_seed, k, chunk_length(samples, k));
  return finish(stats);
}

namespace serial {

McEstimate mc_nsf_oracle(const TwinBeamScenario& scenario, std::int64_t samples,
                         std::uint64_t rng_seed, const McDetection& detection) {
  check_inputs(scenario, samples, detection);
  const std::int64_t chunks = chunk_count(samples);
  std::vector<ChunkStats> stats;
  stats.reserve(static_cast<std::size_t>(chunks));
  for (std::int64_t k = 0; k < chunks; ++k)
    stats.push_back(run_chunk(scenario, detection, rng_seed, k, chunk_length(samples, k)));
  return finish(stats);
}

}  // namespace serial

}  // namespace twinbeam
