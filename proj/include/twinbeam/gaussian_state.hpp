#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace twinbeam {

enum class ModeRole { probe, conjugate, auxiliary };

/// Identifies one optical mode inside a GaussianState.
///
/// Modes are looked up by `index`. The topological charge is carried along
/// as metadata and never enters the covariance dynamics.
struct ModeLabel {
  std::size_t index = 0;
  ModeRole role = ModeRole::auxiliary;
  int topological_charge = 0;

  friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
};

/// Intensity gain of the ideal phase-insensitive amplifier, G >= 1.
struct SqueezerSpec {
  double gain = 1.0;
};

/// Multimode Gaussian state in the quadrature representation.
///
/// Ordering is (X_0, P_0, X_1, P_1, ...), with X = a + a^dagger and
/// P = -i(a - a^dagger), so vacuum has unit variance. Instances are immutable;
/// every operation below returns a new state.
class GaussianState {
 public:
  GaussianState(Eigen::VectorXd means, Eigen::MatrixXd cov, std::vector<ModeLabel> modes);

  const Eigen::VectorXd& means() const { return means_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  const std::vector<ModeLabel>& modes() const { return modes_; }
  std::size_t mode_count() const { return modes_.size(); }

  /// Position of `mode` in the quadrature ordering; throws ValidationError if absent.
  std::size_t slot(const ModeLabel& mode) const;

  /// Smallest eigenvalue of cov + i*Omega. Physical states give >= 0.
  double uncertainty_margin() const;

 private:
  Eigen::VectorXd means_;
  Eigen::MatrixXd cov_;
  std::vector<ModeLabel> modes_;
};

/// Standard symplectic form for `n_modes` modes.
Eigen::MatrixXd symplectic_form(std::size_t n_modes);

GaussianState vacuum_state(std::size_t n_modes, const std::vector<ModeLabel>& labels);

/// Coherent displacement by `amplitude` (units of sqrt(photon flux)).
GaussianState displace(const GaussianState& state, const ModeLabel& mode,
                       std::complex<double> amplitude);

/// 4x4 symplectic matrix of the two-mode squeezer acting on (X_p, P_p, X_c, P_c).
///
/// Bogoliubov map a_p -> sqrt(G) a_p + sqrt(G-1) a_c^dagger (and symmetrically for
/// a_c). The conjugate output is phase conjugated; the amplitude quadratures of
/// the two outputs are positively correlated.
Eigen::Matrix4d squeezer_matrix(double gain);

GaussianState two_mode_squeeze(const GaussianState& state, const ModeLabel& probe,
                               const ModeLabel& conj, const SqueezerSpec& spec);

/// Mix `mode` with vacuum on a beam splitter of transmissivity `eta` and trace
/// out the vacuum port.
GaussianState beamsplit_loss(const GaussianState& state, const ModeLabel& mode, double eta);

/// Applies an affine Gaussian map to a pair of modes:
/// means -> M means, cov -> M cov M^T + noise on the (a, b) block.
GaussianState apply_two_mode_map(const GaussianState& state, const ModeLabel& a,
                                 const ModeLabel& b, const Eigen::Matrix4d& map,
                                 const Eigen::Matrix4d& noise);

Eigen::Matrix2d second_moments(const GaussianState& state, const ModeLabel& i,
                               const ModeLabel& j);

/// <a^dagger a> for a single mode, exact for Gaussian states.
double mean_photon_flux(const GaussianState& state, const ModeLabel& mode);

/// Beams below this mean flux are rejected by the linearized photodetection model.
inline constexpr double kBrightBeamThreshold = 10.0;

/// Amplitude-quadrature variance of a bright beam, i.e. Var(N)/<N> in the
/// linearized regime. 1 is the shot-noise level.
double amplitude_noise_factor(const GaussianState& state, const ModeLabel& mode);

/// Var(N_p - N_c) / (<N_p> + <N_c>) in the bright-beam linearization.
double intensity_difference_nsf(const GaussianState& state, const ModeLabel& probe,
                                const ModeLabel& conj);

}  // namespace twinbeam
