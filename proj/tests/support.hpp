#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "twinbeam/channel.hpp"

namespace testing_support {

// Deterministic generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  std::complex<double> amplitude(double max_abs) {
    const double r = uniform(0.0, max_abs);
    const double phi = uniform(-M_PI, M_PI);
    return std::polar(r, phi);
  }

 private:
  std::mt19937_64 rng_;
};

inline twinbeam::GaussianState seeded_pair(std::complex<double> probe, std::complex<double> conj = 0.0) {
  using namespace twinbeam;
  auto s = vacuum_state(2, {kProbeMode, kConjugateMode});
  s = displace(s, kProbeMode, probe);
  return displace(s, kConjugateMode, conj);
}

}  // namespace testing_support
