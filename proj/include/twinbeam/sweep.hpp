#pragma once

#include <vector>

#include "twinbeam/channel.hpp"
#include "twinbeam/detection.hpp"
#include "twinbeam/gain_curve.hpp"

namespace twinbeam {

struct SweepSettings {
  double delta_min_mhz = kModelDeltaMin;
  double delta_max_mhz = kModelDeltaMax;
  double delta_step_mhz = 1.0;
  FitFamily fit_family = FitFamily::lumped_before;
  int cascade_steps = 800;
  TransmissionRange transmission{};
};

/// Number of grid points delta_min + k * step that do not exceed delta_max.
std::size_t sweep_point_count(const SweepSettings& settings);

struct SweepRow {
  double delta_mhz = 0.0;
  GainPair gains;
  ChannelSpec fitted;
  double fit_residual = 0.0;
  bool fit_reachable = false;
  NoiseMeasurement difference;
  AttenuationOptimum attenuation;
};

/// Evaluates the gain curves at every detuning, fits a channel of the chosen
/// family to the gains, and reports the detected difference noise with and
/// without the optimal probe attenuation. Rows are ordered by detuning.
std::vector<SweepRow> sweep_detuning(const GainCurveModel& model, const DetectionChain& chain,
                                     const SweepSettings& settings);

namespace serial {
std::vector<SweepRow> sweep_detuning(const GainCurveModel& model, const DetectionChain& chain,
                                     const SweepSettings& settings);
}  // namespace serial

}  // namespace twinbeam
