#pragma once

#include <optional>

#include "twinbeam/channel.hpp"

namespace twinbeam {

/// Empirical gains versus two-photon detuning delta (MHz).
///
///   g_p(delta) = floor + (plateau - floor) / (1 + exp(-(delta - center) / width))
///   g_c(delta) = peak * exp(-ln^2(u / u0) / (2 s^2)),  u = edge - delta,  u0 = edge - peak_center
///
/// The conjugate term is a log-normal bump in the distance to `edge`; it peaks
/// exactly at `conj_peak_center`, falls off slowly on the far side and vanishes
/// for delta >= edge. Defaults are calibrated to the reported probe plateau
/// (0.85), probe gain 0.27 at -50 MHz, conjugate maximum 0.27 at -42 MHz, and a
/// total gain reaching one near -20 MHz while staying >= 0.95 on [-25, -5] MHz.
struct GainCurveModel {
  double probe_plateau = 0.8544;
  double probe_floor = 0.0;
  double probe_center_mhz = -42.66;
  double probe_width_mhz = 9.518;
  double conj_peak = 0.2688;
  double conj_peak_center_mhz = -42.0;
  double conj_edge_mhz = 64.18;
  double conj_log_width = 0.3479;

  /// Multiplies every gain amplitude by `factor`.
  GainCurveModel scaled(double factor) const;
};

inline constexpr double kModelDeltaMin = -50.0;
inline constexpr double kModelDeltaMax = 16.0;

void validate(const GainCurveModel& model);

struct GainCurvePoint {
  GainPair gains;
  /// delta lies outside the calibrated [-50, +16] MHz range.
  bool extrapolated = false;
};

GainCurvePoint gain_curves(const GainCurveModel& model, double delta_mhz);

struct DetuningInterval {
  double lower_mhz = 0.0;
  double upper_mhz = 0.0;
};

/// Longest contiguous run of the 0.1 MHz scan over [-50, +16] MHz on which
/// 0.95 <= g_p + g_c <= 1 + 1e-6. Empty optional when no scan point qualifies.
std::optional<DetuningInterval> nonamplifying_window(const GainCurveModel& model);

}  // namespace twinbeam
