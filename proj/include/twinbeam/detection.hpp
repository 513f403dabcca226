#pragma once

#include <string_view>

#include "twinbeam/channel.hpp"

namespace twinbeam {

/// Balanced-photodetector chain. Only the quantum efficiency and the optional
/// electronic noise floor enter the noise model; the remaining fields are
/// carried as measurement metadata.
struct DetectionChain {
  double quantum_efficiency = 0.98;
  double transimpedance_v_per_a = 1e5;
  double analysis_frequency_mhz = 1.2;
  double rbw_khz = 30.0;
  double vbw_hz = 100.0;
  /// Electronic noise variance in units of the shot-noise variance of the
  /// detected beam(s); added to both the signal and the SNL trace.
  double electronic_noise = 0.0;
};

void validate(const DetectionChain& chain);

enum class NoiseChannel { probe, conjugate, difference };

std::string_view to_string(NoiseChannel which);

struct NoiseMeasurement {
  double nsf_linear = 1.0;
  double nsf_db = 0.0;
  NoiseChannel which = NoiseChannel::difference;
};

double to_decibel(double linear);
double from_decibel(double db);

NoiseMeasurement make_measurement(double nsf_linear, NoiseChannel which);

/// Detects `probe` and `conj` with the chain's efficiency and reports the
/// SNL-normalized noise of one beam or of the photocurrent difference.
NoiseMeasurement measure_noise(const GaussianState& state, const ModeLabel& probe,
                               const ModeLabel& conj, const DetectionChain& chain,
                               NoiseChannel which);

struct AttenuationOptimum {
  /// Probe transmission at the optimum (1 - attenuation).
  double t_star = 1.0;
  double nsf_star = 1.0;
  double nsf_unattenuated = 1.0;
  /// The coarse scan found more than one local minimum and the dense-scan
  /// fallback was used to pick the basin.
  bool used_dense_scan = false;
};

struct TransmissionRange {
  double lower = 0.01;
  double upper = 1.0;
};

/// Difference NSF with an extra transmission `t` on the probe before detection.
double difference_nsf_with_probe_transmission(const GaussianState& channel_output,
                                              const ModeLabel& probe, const ModeLabel& conj,
                                              const DetectionChain& chain, double t);

/// Minimizes the difference NSF over the probe transmission t in `range`.
///
/// NSF(t) is assumed unimodal; a coarse scan (dt = 0.05) checks the assumption
/// and a dense scan (dt = 0.005) picks the basin if it fails. The basin is then
/// refined by golden-section search to |dt| < 1e-4. The returned optimum is
/// never worse than the unattenuated beam when t = 1 lies in range.
AttenuationOptimum optimize_probe_attenuation(const GaussianState& channel_output,
                                              const ModeLabel& probe, const ModeLabel& conj,
                                              const DetectionChain& chain,
                                              TransmissionRange range = {});

AttenuationOptimum optimize_probe_attenuation(const TwinBeamScenario& scenario,
                                              const DetectionChain& chain,
                                              TransmissionRange range = {});

}  // namespace twinbeam
