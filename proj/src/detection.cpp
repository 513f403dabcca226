#include "twinbeam/detection.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "twinbeam/error.hpp"

namespace twinbeam {

namespace {

struct Sample {
  double t;
  double nsf;
};

std::vector<Sample> scan(const auto& f, double lower, double upper, double dt) {
  const int n = std::max(1, static_cast<int>(std::ceil((upper - lower) / dt - 1e-9)));
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = i == n ? upper : lower + i * dt;
    out.push_back({t, f(t)});
  }
  return out;
}

int count_local_minima(const std::vector<Sample>& s) {
  int count = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool left = i == 0 || s[i].nsf < s[i - 1].nsf;
    const bool right = i + 1 == s.size() || s[i].nsf < s[i + 1].nsf;
    if (left && right) ++count;
  }
  return count;
}

Sample golden_section(const auto& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double t = 0.5 * (a + b);
  return {t, f(t)};
}

}  // namespace

void validate(const DetectionChain& chain) {
  if (!(chain.quantum_efficiency >= 0.0 && chain.quantum_efficiency <= 1.0))
    throw DomainError("quantum efficiency must lie in [0, 1]");
  if (!(chain.electronic_noise >= 0.0)) throw DomainError("electronic noise must be >= 0");
}

std::string_view to_string(NoiseChannel which) {
  switch (which) {
    case NoiseChannel::probe: return "probe";
    case NoiseChannel::conjugate: return "conjugate";
    case NoiseChannel::difference: return "difference";
  }
  return "unknown";
}

double to_decibel(double linear) {
  if (!(linear > 0.0)) throw DomainError("decibel conversion needs a positive linear value");
  return 10.0 * std::log10(linear);
}

double from_decibel(double db) { return std::pow(10.0, db / 10.0); }

NoiseMeasurement make_measurement(double nsf_linear, NoiseChannel which) {
  return {nsf_linear, to_decibel(nsf_linear), which};
}

NoiseMeasurement measure_noise(const GaussianState& state, const ModeLabel& probe,
                               const ModeLabel& conj, const DetectionChain& chain,
                               NoiseChannel which) {
  validate(chain);
  auto detected = beamsplit_loss(state, probe, chain.quantum_efficiency);
  detected = beamsplit_loss(detected, conj, chain.quantum_efficiency);

  double nsf = 1.0;
  switch (which) {
    case NoiseChannel::probe: nsf = amplitude_noise_factor(detected, probe); break;
    case NoiseChannel::conjugate: nsf = amplitude_noise_factor(detected, conj); break;
    case NoiseChannel::difference: nsf = intensity_difference_nsf(detected, probe, conj); break;
  }
  const double e = chain.electronic_noise;
  return make_measurement((nsf + e) / (1.0 + e), which);
}

double difference_nsf_with_probe_transmission(const GaussianState& channel_output,
                                              const ModeLabel& probe, const ModeLabel& conj,
                                              const DetectionChain& chain, double t) {
  const auto attenuated = beamsplit_loss(channel_output, probe, t);
  return measure_noise(attenuated, probe, conj, chain, NoiseChannel::difference).nsf_linear;
}

AttenuationOptimum optimize_probe_attenuation(const GaussianState& channel_output,
                                              const ModeLabel& probe, const ModeLabel& conj,
                                              const DetectionChain& chain,
                                              TransmissionRange range) {
  if (!(range.lower > 0.0 && range.lower < range.upper && range.upper <= 1.0))
    throw DomainError("transmission range must satisfy 0 < lower < upper <= 1");

  auto f = [&](double t) {
    return difference_nsf_with_probe_transmission(channel_output, probe, conj, chain, t);
  };

  AttenuationOptimum out;
  out.nsf_unattenuated = f(1.0);

  auto grid = scan(f, range.lower, range.upper, 0.05);
  if (count_local_minima(grid) > 1) {
    grid = scan(f, range.lower, range.upper, 0.005);
    out.used_dense_scan = true;
  }
  const auto best = std::min_element(grid.begin(), grid.end(),
                                     [](const Sample& a, const Sample& b) { return a.nsf < b.nsf; });
  const auto i = static_cast<std::size_t>(best - grid.begin());
  const double a = grid[i == 0 ? 0 : i - 1].t;
  const double b = grid[std::min(i + 1, grid.size() - 1)].t;

  Sample opt = golden_section(f, a, b, 1e-4);
  if (best->nsf < opt.nsf) opt = *best;
  // Ties within rounding go to the unattenuated beam.
  if (range.upper == 1.0 && out.nsf_unattenuated <= opt.nsf + 1e-12) opt = {1.0, out.nsf_unattenuated};

  out.t_star = opt.t;
  out.nsf_star = opt.nsf;
  return out;
}

AttenuationOptimum optimize_probe_attenuation(const TwinBeamScenario& scenario,
                                              const DetectionChain& chain,
                                              TransmissionRange range) {
  return optimize_probe_attenuation(propagate(scenario), kProbeMode, kConjugateMode, chain, range);
}

}  // namespace twinbeam
