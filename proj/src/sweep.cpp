#include "twinbeam/sweep.hpp"

#include <cmath>
#include <exception>

#include "twinbeam/error.hpp"

namespace twinbeam {

namespace {

void check(const SweepSettings& s) {
  if (!(s.delta_step_mhz > 0.0)) throw DomainError("sweep step must be > 0");
  if (!(s.delta_max_mhz >= s.delta_min_mhz)) throw DomainError("sweep range is empty");
}

double delta_at(const SweepSettings& s, std::size_t k) {
  return s.delta_min_mhz + static_cast<double>(k) * s.delta_step_mhz;
}

SweepRow evaluate(const GainCurveModel& model, const DetectionChain& chain, const SweepSettings& s,
                  double delta) {
  SweepRow row;
  row.delta_mhz = delta;
  row.gains = gain_curves(model, delta).gains;
  const auto fit = fit_channel(row.gains, std::nullopt, s.fit_family, FitOptions{s.cascade_steps, 1.0});
  row.fitted = fit.spec;
  row.fit_residual = fit.residual;
  row.fit_reachable = fit.reachable;

  const auto out = propagate(TwinBeamScenario{fit.spec, 1000.0, 0.0});
  row.difference = measure_noise(out, kProbeMode, kConjugateMode, chain, NoiseChannel::difference);
  row.attenuation = optimize_probe_attenuation(out, kProbeMode, kConjugateMode, chain, s.transmission);
  return row;
}

}  // namespace

std::size_t sweep_point_count(const SweepSettings& s) {
  check(s);
  return static_cast<std::size_t>(
             std::floor((s.delta_max_mhz - s.delta_min_mhz) / s.delta_step_mhz + 1e-9)) + 1;
}

std::vector<SweepRow> sweep_detuning(const GainCurveModel& model, const DetectionChain& chain,
                                     const SweepSettings& settings) {
  validate(model);
  validate(chain);
  const auto n = static_cast<std::ptrdiff_t>(sweep_point_count(settings));
  std::vector<SweepRow> rows(static_cast<std::size_t>(n));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    try {
      rows[static_cast<std::size_t>(k)] =
          evaluate(model, chain, settings, delta_at(settings, static_cast<std::size_t>(k)));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

namespace serial {

std::vector<SweepRow> sweep_detuning(const GainCurveModel& model, const DetectionChain& chain,
                                     const SweepSettings& settings) {
  validate(model);
  validate(chain);
  const auto n = sweep_point_count(settings);
  std::vector<SweepRow> rows;
  rows.reserve(n);
  for (std::size_t k = 0; k < n; ++k) rows.push_back(evaluate(model, chain, settings, delta_at(settings, k)));
  return rows;
}

}  // namespace serial

}  // namespace twinbeam
