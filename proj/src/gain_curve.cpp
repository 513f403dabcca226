#include "twinbeam/gain_curve.hpp"

#include <cmath>

#include "twinbeam/error.hpp"

namespace twinbeam {

GainCurveModel GainCurveModel::scaled(double factor) const {
  GainCurveModel m = *this;
  m.probe_plateau *= factor;
  m.probe_floor *= factor;
  m.conj_peak *= factor;
  return m;
}

void validate(const GainCurveModel& m) {
  if (!(m.probe_plateau >= 0.0) || !(m.probe_floor >= 0.0) || !(m.conj_peak >= 0.0))
    throw DomainError("gain curve: gain levels must be >= 0");
  if (!(m.probe_width_mhz > 0.0) || !(m.conj_log_width > 0.0))
    throw DomainError("gain curve: widths must be > 0");
  if (!(m.conj_edge_mhz > m.conj_peak_center_mhz))
    throw DomainError("gain curve: conjugate edge must lie above the conjugate peak");
  if (!std::isfinite(m.probe_center_mhz)) throw DomainError("gain curve: probe center must be finite");
}

GainCurvePoint gain_curves(const GainCurveModel& m, double delta_mhz) {
  validate(m);
  GainCurvePoint pt;
  pt.extrapolated = delta_mhz < kModelDeltaMin || delta_mhz > kModelDeltaMax;

  const double z = (delta_mhz - m.probe_center_mhz) / m.probe_width_mhz;
  pt.gains.g_p = m.probe_floor + (m.probe_plateau - m.probe_floor) / (1.0 + std::exp(-z));

  const double u = m.conj_edge_mhz - delta_mhz;
  if (u > 0.0) {
    const double u0 = m.conj_edge_mhz - m.conj_peak_center_mhz;
    const double l = std::log(u / u0);
    pt.gains.g_c = m.conj_peak * std::exp(-l * l / (2.0 * m.conj_log_width * m.conj_log_width));
  }
  return pt;
}

std::optional<DetuningInterval> nonamplifying_window(const GainCurveModel& model) {
  constexpr double step = 0.1;
  const int n = static_cast<int>(std::lround((kModelDeltaMax - kModelDeltaMin) / step));

  std::optional<DetuningInterval> best;
  int run_start = -1;
  auto close_run = [&](int end) {
    if (run_start < 0) return;
    const DetuningInterval iv{kModelDeltaMin + run_start * step, kModelDeltaMin + end * step};
    if (!best || iv.upper_mhz - iv.lower_mhz > best->upper_mhz - best->lower_mhz) best = iv;
    run_start = -1;
  };

  for (int i = 0; i <= n; ++i) {
    const auto g = gain_curves(model, kModelDeltaMin + i * step).gains;
    const double sum = g.g_p + g.g_c;
    if (sum >= 0.95 && sum <= 1.0 + 1e-6) {
      if (run_start < 0) run_start = i;
    } else {
      close_run(i - 1);
    }
  }
  close_run(n);
  return best;
}

}  // namespace twinbeam
