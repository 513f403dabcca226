#include "twinbeam/gaussian_state.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "twinbeam/error.hpp"

namespace twinbeam {

namespace {

void check_labels(const std::vector<ModeLabel>& modes) {
  std::set<std::size_t> seen;
  for (const auto& m : modes) {
    if (!seen.insert(m.index).second) {
      std::ostringstream msg;
      msg << "duplicate mode index " << m.index;
      throw ValidationError(msg.str());
    }
  }
}

// Unit vector along the mean field of one mode, and |<a>|.
struct MeanDirection {
  Eigen::Vector2d unit;
  double amplitude;
};

MeanDirection mean_direction(const GaussianState& state, std::size_t slot) {
  Eigen::Vector2d m = state.means().segment<2>(2 * slot);
  const double norm = m.norm();
  return {norm > 0.0 ? Eigen::Vector2d(m / norm) : Eigen::Vector2d(1.0, 0.0), 0.5 * norm};
}

void require_bright(const GaussianState& state, const ModeLabel& mode) {
  const double flux = mean_photon_flux(state, mode);
  if (flux < kBrightBeamThreshold) {
    std::ostringstream msg;
    msg << "mode " << mode.index << " has mean flux " << flux
        << ", below the bright-beam threshold " << kBrightBeamThreshold;
    throw PreconditionError(msg.str());
  }
}

}  // namespace

GaussianState::GaussianState(Eigen::VectorXd means, Eigen::MatrixXd cov,
                             std::vector<ModeLabel> modes)
    : means_(std::move(means)), cov_(std::move(cov)), modes_(std::move(modes)) {
  if (modes_.empty()) throw ValidationError("a Gaussian state needs at least one mode");
  check_labels(modes_);
  const auto dim = static_cast<Eigen::Index>(2 * modes_.size());
  if (means_.size() != dim || cov_.rows() != dim || cov_.cols() != dim)
    throw ValidationError("means/covariance size does not match the mode count");
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ValidationError("covariance matrix is not symmetric");
}

std::size_t GaussianState::slot(const ModeLabel& mode) const {
  for (std::size_t k = 0; k < modes_.size(); ++k)
    if (modes_[k].index == mode.index) return k;
  std::ostringstream msg;
  msg << "unknown mode index " << mode.index;
  throw ValidationError(msg.str());
}

double GaussianState::uncertainty_margin() const {
  const auto n = modes_.size();
  Eigen::MatrixXcd h = cov_.cast<std::complex<double>>() +
                       std::complex<double>(0.0, 1.0) * symplectic_form(n).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

Eigen::MatrixXd symplectic_form(std::size_t n_modes) {
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; k += 2) {
    omega(k, k + 1) = 1.0;
    omega(k + 1, k) = -1.0;
  }
  return omega;
}

GaussianState vacuum_state(std::size_t n_modes, const std::vector<ModeLabel>& labels) {
  if (n_modes == 0) throw ValidationError("vacuum_state needs at least one mode");
  if (labels.size() != n_modes) throw ValidationError("label count does not match n_modes");
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  return GaussianState(Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Identity(dim, dim), labels);
}

GaussianState displace(const GaussianState& state, const ModeLabel& mode,
                       std::complex<double> amplitude) {
  const auto k = static_cast<Eigen::Index>(state.slot(mode));
  Eigen::VectorXd means = state.means();
  means(2 * k) += 2.0 * amplitude.real();
  means(2 * k + 1) += 2.0 * amplitude.imag();
  return GaussianState(std::move(means), state.cov(), state.modes());
}

Eigen::Matrix4d squeezer_matrix(double gain) {
  if (!(gain >= 1.0)) throw DomainError("squeezer gain must satisfy G >= 1");
  const double a = std::sqrt(gain);
  const double b = std::sqrt(gain - 1.0);
  Eigen::Matrix4d s;
  // clang-format off
  s << a,  0,  b,  0,
       0,  a,  0, -b,
       b,  0,  a,  0,
       0, -b,  0,  a;
  // clang-format on
  return s;
}

GaussianState apply_two_mode_map(const GaussianState& state, const ModeLabel& a,
                                 const ModeLabel& b, const Eigen::Matrix4d& map,
                                 const Eigen::Matrix4d& noise) {
  const auto ka = static_cast<Eigen::Index>(state.slot(a));
  const auto kb = static_cast<Eigen::Index>(state.slot(b));
  if (ka == kb) throw ValidationError("two-mode map needs two distinct modes");

  const Eigen::Index idx[4] = {2 * ka, 2 * ka + 1, 2 * kb, 2 * kb + 1};
  const Eigen::Index dim = state.means().size();

  // Embed the 4x4 map into the full space: T = identity outside the pair.
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(dim, dim);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) t(idx[r], idx[c]) = map(r, c);

  Eigen::VectorXd means = t * state.means();
  Eigen::MatrixXd cov = t * state.cov() * t.transpose();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) cov(idx[r], idx[c]) += noise(r, c);
  cov = 0.5 * (cov + cov.transpose()).eval();
  return GaussianState(std::move(means), std::move(cov), state.modes());
}

GaussianState two_mode_squeeze(const GaussianState& state, const ModeLabel& probe,
                               const ModeLabel& conj, const SqueezerSpec& spec) {
  if (probe.index == conj.index) throw ValidationError("probe and conjugate must differ");
  return apply_two_mode_map(state, probe, conj, squeezer_matrix(spec.gain), Eigen::Matrix4d::Zero());
}

GaussianState beamsplit_loss(const GaussianState& state, const ModeLabel& mode, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("transmissivity must lie in [0, 1]");
  const auto k = static_cast<Eigen::Index>(state.slot(mode));
  const double s = std::sqrt(eta);

  Eigen::VectorXd means = state.means();
  means.segment<2>(2 * k) *= s;

  Eigen::MatrixXd cov = state.cov();
  cov.middleRows(2 * k, 2) *= s;
  cov.middleCols(2 * k, 2) *= s;
  cov.block<2, 2>(2 * k, 2 * k) += (1.0 - eta) * Eigen::Matrix2d::Identity();
  return GaussianState(std::move(means), std::move(cov), state.modes());
}

Eigen::Matrix2d second_moments(const GaussianState& state, const ModeLabel& i,
                               const ModeLabel& j) {
  const auto ki = static_cast<Eigen::Index>(state.slot(i));
  const auto kj = static_cast<Eigen::Index>(state.slot(j));
  return state.cov().block<2, 2>(2 * ki, 2 * kj);
}

double mean_photon_flux(const GaussianState& state, const ModeLabel& mode) {
  const auto k = static_cast<Eigen::Index>(state.slot(mode));
  const double coherent = state.means().segment<2>(2 * k).squaredNorm() / 4.0;
  const double excess = (state.cov().block<2, 2>(2 * k, 2 * k).trace() - 2.0) / 4.0;
  return std::max(0.0, coherent + excess);
}

double amplitude_noise_factor(const GaussianState& state, const ModeLabel& mode) {
  require_bright(state, mode);
  const auto k = state.slot(mode);
  const auto dir = mean_direction(state, k);
  const auto kk = static_cast<Eigen::Index>(2 * k);
  return dir.unit.dot(state.cov().block<2, 2>(kk, kk) * dir.unit);
}

// Linearized photodetection: delta N = |<a>| delta X_theta, where X_theta is the
// quadrature along the mean field. Means and SNL use the mean-field photon
// number |<a>|^2; the vacuum-seeded contribution is dropped at this order.
double intensity_difference_nsf(const GaussianState& state, const ModeLabel& probe,
                                const ModeLabel& conj) {
  if (probe.index == conj.index) throw ValidationError("probe and conjugate must differ");
  require_bright(state, probe);
  require_bright(state, conj);

  const auto kp = state.slot(probe);
  const auto kc = state.slot(conj);
  const auto p = mean_direction(state, kp);
  const auto c = mean_direction(state, kc);
  const auto ip = static_cast<Eigen::Index>(2 * kp);
  const auto ic = static_cast<Eigen::Index>(2 * kc);

  const double vp = p.unit.dot(state.cov().block<2, 2>(ip, ip) * p.unit);
  const double vc = c.unit.dot(state.cov().block<2, 2>(ic, ic) * c.unit);
  const double cpc = p.unit.dot(state.cov().block<2, 2>(ip, ic) * c.unit);

  const double np = p.amplitude * p.amplitude;
  const double nc = c.amplitude * c.amplitude;
  const double var = np * vp + nc * vc - 2.0 * p.amplitude * c.amplitude * cpc;
  return var / (np + nc);
}

}  // namespace twinbeam
