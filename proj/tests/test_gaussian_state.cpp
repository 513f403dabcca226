#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "twinbeam/error.hpp"
#include "twinbeam/gaussian_state.hpp"

using namespace twinbeam;
using testing_support::Gen;
using testing_support::seeded_pair;

namespace {

// Covariance of the two-mode squeezed vacuum written out directly from the
// Bogoliubov coefficients u = sqrt(G), v = sqrt(G - 1).
Eigen::Matrix4d tmsv_cov(double G) {
  const double u = std::sqrt(G), v = std::sqrt(G - 1.0);
  const double d = u * u + v * v, c = 2.0 * u * v;
  Eigen::Matrix4d m;
  m << d, 0, c, 0,
       0, d, 0, -c,
       c, 0, d, 0,
       0, -c, 0, d;
  return m;
}

}  // namespace

TEST_CASE("vacuum state has unit covariance and zero means") {
  for (std::size_t n : {1u, 2u, 3u}) {
    std::vector<ModeLabel> labels;
    for (std::size_t k = 0; k < n; ++k) labels.push_back({k, ModeRole::auxiliary, 0});
    const auto s = vacuum_state(n, labels);
    CHECK(s.means().isZero());
    CHECK(s.cov().isIdentity());
    CHECK(s.uncertainty_margin() == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("vacuum state rejects bad labels") {
  CHECK_THROWS_AS(vacuum_state(0, {}), ValidationError);
  CHECK_THROWS_AS(vacuum_state(2, {kProbeMode}), ValidationError);
  CHECK_THROWS_AS(vacuum_state(2, {kProbeMode, kProbeMode}), ValidationError);
}

TEST_CASE("constructor checks shape and symmetry") {
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(2, 2);
  CHECK_NOTHROW(GaussianState(Eigen::VectorXd::Zero(2), cov, {kProbeMode}));
  cov(0, 1) = 0.5;
  CHECK_THROWS_AS(GaussianState(Eigen::VectorXd::Zero(2), cov, {kProbeMode}), ValidationError);
  CHECK_THROWS_AS(GaussianState(Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(2, 2), {kProbeMode}),
                  ValidationError);
}

TEST_CASE("displacement adds to the means and leaves the covariance") {
  auto s = vacuum_state(2, {kProbeMode, kConjugateMode});
  const auto zero = displace(s, kProbeMode, 0.0);
  CHECK(zero.means().isZero());

  const auto one = displace(s, kProbeMode, 1.0);
  CHECK(one.means()(0) == doctest::Approx(2.0));
  CHECK(one.means()(1) == doctest::Approx(0.0));
  CHECK(one.cov().isIdentity());

  const std::complex<double> a{0.3, -1.2}, b{-2.0, 0.7};
  const auto ab = displace(displace(s, kConjugateMode, a), kConjugateMode, b);
  const auto sum = displace(s, kConjugateMode, a + b);
  CHECK((ab.means() - sum.means()).norm() < 1e-12);
  CHECK(mean_photon_flux(sum, kConjugateMode) == doctest::Approx(std::norm(a + b)));
}

TEST_CASE("unknown mode is rejected") {
  const auto s = vacuum_state(1, {kProbeMode});
  CHECK_THROWS_AS(displace(s, kConjugateMode, 1.0), ValidationError);
}

TEST_CASE("two-mode squeezer matches the Bogoliubov covariance") {
  const auto vac = vacuum_state(2, {kProbeMode, kConjugateMode});
  for (double G : {1.0, 1.5, 2.0, 6.26, 40.0}) {
    const auto s = two_mode_squeeze(vac, kProbeMode, kConjugateMode, SqueezerSpec{G});
    CHECK((s.cov() - tmsv_cov(G)).cwiseAbs().maxCoeff() < 1e-12 * G);
  }
  const auto id = two_mode_squeeze(vac, kProbeMode, kConjugateMode, SqueezerSpec{1.0});
  CHECK(id.cov().isIdentity());
}

TEST_CASE("squeezer conjugates the seed phase onto the conjugate beam") {
  const std::complex<double> alpha{3.0, 4.0};
  const double G = 2.0;
  const auto s = two_mode_squeeze(seeded_pair(alpha), kProbeMode, kConjugateMode, SqueezerSpec{G});
  const double u = std::sqrt(G), v = std::sqrt(G - 1.0);
  CHECK(s.means()(0) == doctest::Approx(2 * u * alpha.real()));
  CHECK(s.means()(1) == doctest::Approx(2 * u * alpha.imag()));
  CHECK(s.means()(2) == doctest::Approx(2 * v * alpha.real()));
  CHECK(s.means()(3) == doctest::Approx(-2 * v * alpha.imag()));
  CHECK(mean_photon_flux(s, kProbeMode) == doctest::Approx(G * 25.0 + (G - 1.0)));
  CHECK(mean_photon_flux(s, kConjugateMode) == doctest::Approx((G - 1.0) * 25.0 + (G - 1.0)));
}

TEST_CASE("squeezer argument checks") {
  const auto vac = vacuum_state(2, {kProbeMode, kConjugateMode});
  CHECK_THROWS_AS(squeezer_matrix(0.99), DomainError);
  CHECK_THROWS_AS(two_mode_squeeze(vac, kProbeMode, kConjugateMode, SqueezerSpec{0.5}), DomainError);
  CHECK_THROWS_AS(two_mode_squeeze(vac, kProbeMode, kProbeMode, SqueezerSpec{2.0}), ValidationError);
}

TEST_CASE("squeezer matrix is symplectic") {
  Gen gen(11);
  const Eigen::Matrix4d omega = symplectic_form(2);
  for (int k = 0; k < 200; ++k) {
    const double G = gen.uniform(1.0, 100.0);
    const Eigen::Matrix4d S = squeezer_matrix(G);
    CHECK((S * omega * S.transpose() - omega).cwiseAbs().maxCoeff() < 1e-9 * G);
  }
}

TEST_CASE("beam splitter loss") {
  const std::complex<double> alpha{10.0, -5.0};
  const auto s = seeded_pair(alpha);
  SUBCASE("eta = 1 is the identity") {
    const auto t = beamsplit_loss(s, kProbeMode, 1.0);
    CHECK((t.means() - s.means()).norm() == 0.0);
    CHECK((t.cov() - s.cov()).norm() == 0.0);
  }
  SUBCASE("eta = 0 replaces the mode by vacuum") {
    const auto sq = two_mode_squeeze(s, kProbeMode, kConjugateMode, SqueezerSpec{3.0});
    const auto t = beamsplit_loss(sq, kProbeMode, 0.0);
    CHECK(t.means().head<2>().isZero());
    CHECK(t.cov().topLeftCorner<2, 2>().isIdentity(1e-12));
    CHECK(t.cov().topRightCorner<2, 2>().isZero());
  }
  SUBCASE("coherent flux scales with eta, variance stays at shot noise") {
    const auto t = beamsplit_loss(s, kProbeMode, 0.33);
    CHECK(mean_photon_flux(t, kProbeMode) == doctest::Approx(0.33 * std::norm(alpha)));
    CHECK(t.cov().topLeftCorner<2, 2>().isIdentity(1e-12));
  }
  CHECK_THROWS_AS(beamsplit_loss(s, kProbeMode, -0.1), DomainError);
  CHECK_THROWS_AS(beamsplit_loss(s, kProbeMode, 1.1), DomainError);
}

TEST_CASE("photon flux") {
  const auto vac = vacuum_state(2, {kProbeMode, kConjugateMode});
  CHECK(mean_photon_flux(vac, kProbeMode) == 0.0);
  CHECK(mean_photon_flux(seeded_pair({2.0, 1.0}), kProbeMode) == doctest::Approx(5.0));
  const auto tmsv = two_mode_squeeze(vac, kProbeMode, kConjugateMode, SqueezerSpec{2.0});
  CHECK(mean_photon_flux(tmsv, kProbeMode) == doctest::Approx(1.0));
  CHECK(mean_photon_flux(tmsv, kConjugateMode) == doctest::Approx(1.0));
}

TEST_CASE("second moments block") {
  const auto tmsv = two_mode_squeeze(vacuum_state(2, {kProbeMode, kConjugateMode}), kProbeMode,
                                     kConjugateMode, SqueezerSpec{2.0});
  const Eigen::Matrix2d cross = second_moments(tmsv, kProbeMode, kConjugateMode);
  CHECK(cross(0, 0) == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(cross(1, 1) == doctest::Approx(-2.0 * std::sqrt(2.0)));
}

TEST_CASE("difference noise of the seeded ideal squeezer") {
  for (double G : {1.5, 2.0, 57.6 / 9.2, 20.0}) {
    const auto s = two_mode_squeeze(seeded_pair(1000.0), kProbeMode, kConjugateMode, SqueezerSpec{G});
    CHECK(intensity_difference_nsf(s, kProbeMode, kConjugateMode) ==
          doctest::Approx(1.0 / (2.0 * G - 1.0)).epsilon(1e-9));
    CHECK(amplitude_noise_factor(s, kProbeMode) == doctest::Approx(2.0 * G - 1.0).epsilon(1e-9));
    CHECK(amplitude_noise_factor(s, kConjugateMode) == doctest::Approx(2.0 * G - 1.0).epsilon(1e-9));
  }
}

TEST_CASE("independent coherent beams sit at shot noise") {
  const auto s = seeded_pair(1000.0, {0.0, 700.0});
  CHECK(intensity_difference_nsf(s, kProbeMode, kConjugateMode) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(amplitude_noise_factor(s, kConjugateMode) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dark beams are rejected by the linearized noise model") {
  const auto s = seeded_pair(1000.0);
  CHECK_THROWS_AS(intensity_difference_nsf(s, kProbeMode, kConjugateMode), PreconditionError);
  CHECK_THROWS_AS(amplitude_noise_factor(s, kConjugateMode), PreconditionError);
  CHECK_THROWS_AS(amplitude_noise_factor(seeded_pair(3.0), kProbeMode), PreconditionError);
}

TEST_CASE("property: balanced loss law") {
  Gen gen(21);
  for (int k = 0; k < 200; ++k) {
    const double G = gen.uniform(1.01, 30.0);
    const double eta = gen.uniform(0.0, 1.0);
    auto s = two_mode_squeeze(seeded_pair(gen.amplitude(1e4) + 2e3), kProbeMode, kConjugateMode,
                              SqueezerSpec{G});
    s = beamsplit_loss(beamsplit_loss(s, kProbeMode, eta), kConjugateMode, eta);
    if (mean_photon_flux(s, kConjugateMode) < 100.0) continue;
    const double expected = eta / (2.0 * G - 1.0) + (1.0 - eta);
    CHECK(intensity_difference_nsf(s, kProbeMode, kConjugateMode) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("property: individual beam noise after balanced loss") {
  Gen gen(22);
  for (int k = 0; k < 200; ++k) {
    const double G = gen.uniform(1.01, 30.0);
    const double eta = gen.uniform(0.05, 1.0);
    auto s = two_mode_squeeze(seeded_pair(5e3), kProbeMode, kConjugateMode, SqueezerSpec{G});
    s = beamsplit_loss(s, kProbeMode, eta);
    CHECK(amplitude_noise_factor(s, kProbeMode) == doctest::Approx(eta * (2.0 * G - 1.0) + 1.0 - eta).epsilon(1e-9));
  }
}

TEST_CASE("property: ideal gains differ by one") {
  Gen gen(23);
  for (int k = 0; k < 100; ++k) {
    const double G = gen.uniform(1.0, 50.0);
    const double seed = gen.uniform(10.0, 1e4);
    const auto s = two_mode_squeeze(seeded_pair(seed), kProbeMode, kConjugateMode, SqueezerSpec{G});
    // Spontaneous flux G - 1 appears on both beams and cancels in the difference.
    const double diff = mean_photon_flux(s, kProbeMode) - mean_photon_flux(s, kConjugateMode);
    CHECK(diff / (seed * seed) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("property: random operation sequences stay physical") {
  Gen gen(24);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = vacuum_state(2, {kProbeMode, kConjugateMode});
    const int ops = gen.integer(1, 12);
    for (int k = 0; k < ops; ++k) {
      const ModeLabel& m = gen.coin() ? kProbeMode : kConjugateMode;
      switch (gen.integer(0, 2)) {
        case 0: s = displace(s, m, gen.amplitude(50.0)); break;
        case 1: s = two_mode_squeeze(s, kProbeMode, kConjugateMode, SqueezerSpec{gen.uniform(1.0, 4.0)}); break;
        default: s = beamsplit_loss(s, m, gen.uniform(0.0, 1.0)); break;
      }
    }
    const double scale = s.cov().cwiseAbs().maxCoeff();
    CHECK(s.uncertainty_margin() >= -1e-9 * scale);
    CHECK((s.cov() - s.cov().transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  }
}
