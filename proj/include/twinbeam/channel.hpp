#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "twinbeam/gaussian_state.hpp"

namespace twinbeam {

enum class LossPlacement { loss_before_gain, loss_after_gain };

/// Ideal amplifier combined with lumped per-beam transmissions.
///
/// With loss_before_gain only the seeded probe input is attenuated (by
/// eta_probe) and eta_conj is ignored. With loss_after_gain both outputs are
/// attenuated after the squeezer.
struct LumpedChannelSpec {
  double gain = 1.0;
  double eta_probe = 1.0;
  double eta_conj = 1.0;
  LossPlacement placement = LossPlacement::loss_after_gain;
};

/// Distributed gain and absorption, discretized into `steps` symmetric
/// (Strang) split steps: half-step loss, squeeze, half-step loss.
///
/// gamma_total is the integrated squeeze parameter, so the lossless cascade is
/// an ideal amplifier with G = cosh^2(gamma_total). The alpha totals are
/// integrated intensity absorption exponents: a beam alone sees exp(-alpha).
struct CascadeSpec {
  int steps = 800;
  double gamma_total = 0.0;
  double alpha_probe_total = 0.0;
  double alpha_conj_total = 0.0;
};

/// SqueezerSpec doubles as the ideal channel; G = 1 is the identity channel.
using ChannelSpec = std::variant<SqueezerSpec, LumpedChannelSpec, CascadeSpec>;

/// Output power over seed power for each beam.
struct GainPair {
  double g_p = 0.0;
  double g_c = 0.0;
};

void validate(const LumpedChannelSpec& spec);
void validate(const CascadeSpec& spec);
void validate(const ChannelSpec& spec);

GaussianState apply_lumped_channel(const GaussianState& state, const ModeLabel& probe,
                                   const ModeLabel& conj, const LumpedChannelSpec& spec);

GaussianState apply_cascade(const GaussianState& state, const ModeLabel& probe,
                            const ModeLabel& conj, const CascadeSpec& spec);

GaussianState apply_channel(const GaussianState& state, const ModeLabel& probe,
                            const ModeLabel& conj, const ChannelSpec& spec);

GainPair channel_gains(const ChannelSpec& spec);

/// A seeded twin-beam experiment: vacuum probe and conjugate modes, coherent
/// seeds, then the channel.
struct TwinBeamScenario {
  ChannelSpec channel = SqueezerSpec{1.0};
  std::complex<double> seed_probe = 1000.0;
  std::complex<double> seed_conj = 0.0;
};

inline const ModeLabel kProbeMode{0, ModeRole::probe, -1};
inline const ModeLabel kConjugateMode{1, ModeRole::conjugate, +1};

/// Output state of the scenario, with modes kProbeMode and kConjugateMode.
GaussianState propagate(const TwinBeamScenario& scenario);

enum class FitFamily { ideal, lumped_before, lumped_after, lumped_after_balanced, cascade };

std::string_view to_string(FitFamily family);
std::optional<FitFamily> parse_fit_family(std::string_view name);

struct FitOptions {
  int cascade_steps = 800;
  /// Efficiency applied to both beams before the NSF is compared to target_nsf.
  double detection_efficiency = 1.0;
};

struct FitResult {
  ChannelSpec spec;
  GainPair gains;
  /// Sum of squared relative residuals over the fitted targets.
  double residual = 0.0;
  /// False when the target could not be matched to 1e-6; the spec is then the
  /// best found, not a solution.
  bool reachable = false;
  int iterations = 0;
};

/// Difference NSF of the channel for a bright coherent probe seed, with both
/// beams detected at `detection_efficiency`.
double channel_difference_nsf(const ChannelSpec& spec, double detection_efficiency = 1.0);

/// Inverts a channel family against measured gains, optionally also against a
/// linear difference NSF. Derivative-free simplex search started from the
/// closed-form lumped inversion.
FitResult fit_channel(const GainPair& target, std::optional<double> target_nsf, FitFamily family,
                      const FitOptions& options = {});

}  // namespace twinbeam
