#include "twinbeam/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "twinbeam/error.hpp"

namespace twinbeam {

namespace {

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

Eigen::Matrix4d pair_loss(double t_probe, double t_conj) {
  Eigen::Vector4d d(std::sqrt(t_probe), std::sqrt(t_probe), std::sqrt(t_conj), std::sqrt(t_conj));
  return d.asDiagonal();
}

Eigen::Matrix4d pair_loss_noise(double t_probe, double t_conj) {
  Eigen::Vector4d d(1.0 - t_probe, 1.0 - t_probe, 1.0 - t_conj, 1.0 - t_conj);
  return d.asDiagonal();
}

// Affine map (M, Q) of the whole cascade on the (probe, conj) pair, built by
// composing the per-step map `steps` times.
struct PairMap {
  Eigen::Matrix4d map;
  Eigen::Matrix4d noise;
};

PairMap cascade_map(const CascadeSpec& spec) {
  const double n = static_cast<double>(spec.steps);
  const double step_gain = std::pow(std::cosh(spec.gamma_total / n), 2);
  const double tp = std::exp(-spec.alpha_probe_total / (2.0 * n));
  const double tc = std::exp(-spec.alpha_conj_total / (2.0 * n));

  const Eigen::Matrix4d s = squeezer_matrix(step_gain);
  const Eigen::Matrix4d l = pair_loss(tp, tc);
  const Eigen::Matrix4d ln = pair_loss_noise(tp, tc);

  // half loss -> squeeze -> half loss
  const Eigen::Matrix4d m = l * s * l;
  const Eigen::Matrix4d q = l * s * ln * s.transpose() * l.transpose() + ln;

  PairMap total{Eigen::Matrix4d::Identity(), Eigen::Matrix4d::Zero()};
  for (int k = 0; k < spec.steps; ++k) {
    total.map = m * total.map;
    total.noise = m * total.noise * m.transpose() + q;
  }
  total.noise = 0.5 * (total.noise + total.noise.transpose()).eval();
  return total;
}

double relative_sq(double value, double target) {
  const double scale = std::max(std::abs(target), 1e-9);
  const double r = (value - target) / scale;
  return r * r;
}

// Nelder-Mead over `x0` using GSL's nmsimplex2, restarted once from the best
// vertex to avoid premature collapse.
struct SimplexOutcome {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
};

SimplexOutcome minimize_simplex(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> x0, const std::vector<double>& steps) {
  gsl_set_error_handler_off();
  const std::size_t n = x0.size();

  struct Ctx {
    const std::function<double(const std::vector<double>&)>* f;
    std::size_t n;
  } ctx{&f, n};

  gsl_multimin_function fn;
  fn.n = n;
  fn.params = &ctx;
  fn.f = [](const gsl_vector* v, void* p) -> double {
    auto* c = static_cast<Ctx*>(p);
    std::vector<double> x(c->n);
    for (std::size_t i = 0; i < c->n; ++i) x[i] = gsl_vector_get(v, i);
    const double value = (*c->f)(x);
    return std::isfinite(value) ? value : std::numeric_limits<double>::max() / 4;
  };

  SimplexOutcome out{x0, f(x0), 0};
  gsl_vector* x = gsl_vector_alloc(n);
  gsl_vector* ss = gsl_vector_alloc(n);
  gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);

  for (int restart = 0; restart < 2; ++restart) {
    for (std::size_t i = 0; i < n; ++i) {
      gsl_vector_set(x, i, out.x[i]);
      gsl_vector_set(ss, i, restart == 0 ? steps[i] : 0.1 * steps[i]);
    }
    gsl_multimin_fminimizer_set(s, &fn, x, ss);
    for (int iter = 0; iter < 20000; ++iter) {
      ++out.iterations;
      if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-13) == GSL_SUCCESS) break;
    }
    if (s->fval <= out.value) {
      out.value = s->fval;
      for (std::size_t i = 0; i < n; ++i) out.x[i] = gsl_vector_get(s->x, i);
    }
  }

  gsl_multimin_fminimizer_free(s);
  gsl_vector_free(ss);
  gsl_vector_free(x);
  return out;
}

struct LumpedInversion {
  double gain;
  double eta;
};

// g_p = eta G, g_c = eta (G - 1)  =>  eta = g_p - g_c, G = g_p / (g_p - g_c).
LumpedInversion invert_lumped(const GainPair& target) {
  const double diff = target.g_p - target.g_c;
  if (diff <= 0.0 || target.g_p <= 0.0) return {2.0, 0.5};
  if (diff > 1.0) return {std::max(1.0, target.g_p), 1.0};
  return {target.g_p / diff, diff};
}

}  // namespace

void validate(const LumpedChannelSpec& spec) {
  if (!(spec.gain >= 1.0)) throw DomainError("lumped channel: gain must satisfy G >= 1");
  if (!in_unit_interval(spec.eta_probe) || !in_unit_interval(spec.eta_conj))
    throw DomainError("lumped channel: transmissions must lie in [0, 1]");
}

void validate(const CascadeSpec& spec) {
  if (spec.steps < 1) throw DomainError("cascade: steps must be >= 1");
  if (!(spec.gamma_total >= 0.0) || !(spec.alpha_probe_total >= 0.0) ||
      !(spec.alpha_conj_total >= 0.0))
    throw DomainError("cascade: gain and absorption totals must be >= 0");
  if (!std::isfinite(spec.gamma_total) || !std::isfinite(spec.alpha_probe_total) ||
      !std::isfinite(spec.alpha_conj_total))
    throw DomainError("cascade: totals must be finite");
}

void validate(const ChannelSpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SqueezerSpec>) {
          if (!(s.gain >= 1.0)) throw DomainError("ideal channel: gain must satisfy G >= 1");
        } else {
          validate(s);
        }
      },
      spec);
}

GaussianState apply_lumped_channel(const GaussianState& state, const ModeLabel& probe,
                                   const ModeLabel& conj, const LumpedChannelSpec& spec) {
  validate(spec);
  if (spec.placement == LossPlacement::loss_before_gain) {
    auto attenuated = beamsplit_loss(state, probe, spec.eta_probe);
    return two_mode_squeeze(attenuated, probe, conj, SqueezerSpec{spec.gain});
  }
  auto amplified = two_mode_squeeze(state, probe, conj, SqueezerSpec{spec.gain});
  auto out = beamsplit_loss(amplified, probe, spec.eta_probe);
  return beamsplit_loss(out, conj, spec.eta_conj);
}

GaussianState apply_cascade(const GaussianState& state, const ModeLabel& probe,
                            const ModeLabel& conj, const CascadeSpec& spec) {
  validate(spec);
  const auto total = cascade_map(spec);
  return apply_two_mode_map(state, probe, conj, total.map, total.noise);
}

GaussianState apply_channel(const GaussianState& state, const ModeLabel& probe,
                            const ModeLabel& conj, const ChannelSpec& spec) {
  return std::visit(
      [&](const auto& s) -> GaussianState {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SqueezerSpec>)
          return two_mode_squeeze(state, probe, conj, s);
        else if constexpr (std::is_same_v<T, LumpedChannelSpec>)
          return apply_lumped_channel(state, probe, conj, s);
        else
          return apply_cascade(state, probe, conj, s);
      },
      spec);
}

GaussianState propagate(const TwinBeamScenario& scenario) {
  auto state = vacuum_state(2, {kProbeMode, kConjugateMode});
  state = displace(state, kProbeMode, scenario.seed_probe);
  state = displace(state, kConjugateMode, scenario.seed_conj);
  return apply_channel(state, kProbeMode, kConjugateMode, scenario.channel);
}

GainPair channel_gains(const ChannelSpec& spec) {
  validate(spec);
  const auto out = propagate(TwinBeamScenario{spec, 1.0, 0.0});
  // Output/input ratio of the coherent (mean-field) power.
  return {out.means().segment<2>(0).squaredNorm() / 4.0, out.means().segment<2>(2).squaredNorm() / 4.0};
}

double channel_difference_nsf(const ChannelSpec& spec, double detection_efficiency) {
  auto out = propagate(TwinBeamScenario{spec, 1000.0, 0.0});
  out = beamsplit_loss(out, kProbeMode, detection_efficiency);
  out = beamsplit_loss(out, kConjugateMode, detection_efficiency);
  return intensity_difference_nsf(out, kProbeMode, kConjugateMode);
}

std::string_view to_string(FitFamily family) {
  switch (family) {
    case FitFamily::ideal: return "ideal";
    case FitFamily::lumped_before: return "lumped_before";
    case FitFamily::lumped_after: return "lumped_after";
    case FitFamily::lumped_after_balanced: return "lumped_after_balanced";
    case FitFamily::cascade: return "cascade";
  }
  return "unknown";
}

std::optional<FitFamily> parse_fit_family(std::string_view name) {
  for (auto f : {FitFamily::ideal, FitFamily::lumped_before, FitFamily::lumped_after,
                 FitFamily::lumped_after_balanced, FitFamily::cascade})
    if (to_string(f) == name) return f;
  return std::nullopt;
}

FitResult fit_channel(const GainPair& target, std::optional<double> target_nsf, FitFamily family,
                      const FitOptions& options) {
  if (!(target.g_p >= 0.0) || !(target.g_c >= 0.0))
    throw DomainError("fit target gains must be >= 0");
  if (target_nsf && !(*target_nsf > 0.0)) throw DomainError("fit target NSF must be > 0");
  if (!in_unit_interval(options.detection_efficiency))
    throw DomainError("detection efficiency must lie in [0, 1]");
  if (options.cascade_steps < 1) throw DomainError("cascade steps must be >= 1");

  const bool use_nsf = target_nsf.has_value();
  const auto lumped0 = invert_lumped(target);

  // Parameter vector -> spec; nullopt when the vector leaves the admissible set.
  std::function<std::optional<ChannelSpec>(const std::vector<double>&)> to_spec;
  std::vector<double> x0;
  std::vector<double> steps;

  switch (family) {
    case FitFamily::ideal: {
      // Weighted least squares for G against (G, G - 1).
      const double wp = 1.0 / std::pow(std::max(target.g_p, 1e-9), 2);
      const double wc = 1.0 / std::pow(std::max(target.g_c, 1e-9), 2);
      const double g0 = std::max(1.0, (wp * target.g_p + wc * (target.g_c + 1.0)) / (wp + wc));
      x0 = {g0};
      steps = {0.05 * g0};
      to_spec = [](const std::vector<double>& x) -> std::optional<ChannelSpec> {
        if (!(x[0] >= 1.0)) return std::nullopt;
        return SqueezerSpec{x[0]};
      };
      break;
    }
    case FitFamily::lumped_before:
    case FitFamily::lumped_after_balanced: {
      const auto placement = family == FitFamily::lumped_before ? LossPlacement::loss_before_gain
                                                                : LossPlacement::loss_after_gain;
      x0 = {lumped0.gain, lumped0.eta};
      steps = {0.05 * lumped0.gain, 0.05};
      to_spec = [placement](const std::vector<double>& x) -> std::optional<ChannelSpec> {
        if (!(x[0] >= 1.0) || !in_unit_interval(x[1])) return std::nullopt;
        return LumpedChannelSpec{x[0], x[1], x[1], placement};
      };
      break;
    }
    case FitFamily::lumped_after: {
      // Without an NSF target the conjugate is taken lossless.
      const double g0 = 1.0 + target.g_c;
      const double ep0 = std::clamp(target.g_p / g0, 0.0, 1.0);
      if (use_nsf) {
        // Along G -> (G, g_p / G, g_c / (G - 1)) the gains match exactly; start
        // from the point of that curve closest to the NSF target.
        const double g_lo = std::max({1.0 + 1e-6, target.g_p, 1.0 + target.g_c});
        double best_g = g_lo, best_r = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 400; ++k) {
          const double g = g_lo * std::pow(100.0, k / 400.0);
          const LumpedChannelSpec s{g, std::min(1.0, target.g_p / g), std::min(1.0, target.g_c / (g - 1.0)),
                                    LossPlacement::loss_after_gain};
          try {
            const double r = relative_sq(channel_difference_nsf(s, options.detection_efficiency), *target_nsf);
            if (r < best_r) {
              best_r = r;
              best_g = g;
            }
          } catch (const PreconditionError&) {
          }
        }
        x0 = {best_g, std::min(1.0, target.g_p / best_g), std::min(1.0, target.g_c / (best_g - 1.0))};
        steps = {0.01 * best_g, 0.01, 0.01};
        to_spec = [](const std::vector<double>& x) -> std::optional<ChannelSpec> {
          if (!(x[0] >= 1.0) || !in_unit_interval(x[1]) || !in_unit_interval(x[2])) return std::nullopt;
          return LumpedChannelSpec{x[0], x[1], x[2], LossPlacement::loss_after_gain};
        };
      } else {
        x0 = {g0, ep0};
        steps = {0.05 * g0, 0.05};
        to_spec = [](const std::vector<double>& x) -> std::optional<ChannelSpec> {
          if (!(x[0] >= 1.0) || !in_unit_interval(x[1])) return std::nullopt;
          return LumpedChannelSpec{x[0], x[1], 1.0, LossPlacement::loss_after_gain};
        };
      }
      break;
    }
    case FitFamily::cascade: {
      const int n = options.cascade_steps;
      const double gamma0 = std::acosh(std::sqrt(lumped0.gain));
      const double alpha0 = -std::log(std::max(lumped0.eta, 1e-6));
      if (use_nsf) {
        x0 = {gamma0, alpha0, 0.0};
        steps = {0.05 + 0.05 * gamma0, 0.05 + 0.05 * alpha0, 0.05};
        to_spec = [n](const std::vector<double>& x) -> std::optional<ChannelSpec> {
          if (!(x[0] >= 0.0) || !(x[1] >= 0.0) || !(x[2] >= 0.0)) return std::nullopt;
          return CascadeSpec{n, x[0], x[1], x[2]};
        };
      } else {
        x0 = {gamma0, alpha0};
        steps = {0.05 + 0.05 * gamma0, 0.05 + 0.05 * alpha0};
        to_spec = [n](const std::vector<double>& x) -> std::optional<ChannelSpec> {
          if (!(x[0] >= 0.0) || !(x[1] >= 0.0)) return std::nullopt;
          return CascadeSpec{n, x[0], x[1], 0.0};
        };
      }
      break;
    }
  }

  const double det = options.detection_efficiency;
  auto objective = [&](const std::vector<double>& x) -> double {
    const auto spec = to_spec(x);
    if (!spec) return 1e6;
    const auto g = channel_gains(*spec);
    double r = relative_sq(g.g_p, target.g_p) + relative_sq(g.g_c, target.g_c);
    if (use_nsf) {
      try {
        r += relative_sq(channel_difference_nsf(*spec, det), *target_nsf);
      } catch (const PreconditionError&) {
        return 1e6;
      }
    }
    return r;
  };

  const auto best = minimize_simplex(objective, x0, steps);
  const auto spec = to_spec(best.x);
  if (!spec) throw DomainError("fit left the admissible parameter set");

  FitResult result{*spec, channel_gains(*spec), best.value, false, best.iterations};
  result.reachable = result.residual < 1e-6;
  return result;
}

}  // namespace twinbeam
