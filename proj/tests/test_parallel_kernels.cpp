#include <doctest.h>

#include <omp.h>

#include "twinbeam/lg_mode.hpp"
#include "twinbeam/mc_oracle.hpp"
#include "twinbeam/sweep.hpp"

using namespace twinbeam;

namespace {

const int kThreadCounts[] = {1, 2, 3, 4};

struct ThreadScope {
  int saved = omp_get_max_threads();
  explicit ThreadScope(int n) { omp_set_num_threads(n); }
  ~ThreadScope() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("lg_field matches the serial reference") {
  const GridGeometry g{1480.0, 200};
  const LGModeSpec spec{-2, 1, 370.0, 894.6};
  const auto ref = serial::lg_field(spec, g, 5e4);
  for (int n : kThreadCounts) {
    ThreadScope scope(n);
    const auto par = lg_field(spec, g, 5e4);
    CHECK(par.values == ref.values);
    CHECK(par.captured_power == ref.captured_power);
    CHECK(par.clipped == ref.clipped);
  }
}

TEST_CASE("interference matches the serial reference") {
  const GridGeometry g{1480.0, 200};
  const auto field = serial::lg_field({3, 0}, g);
  const Tilt tilt = tilt_for_fringes(g, 12.0);
  const auto ref = serial::interfere_plane_wave(field, tilt);
  for (int n : kThreadCounts) {
    ThreadScope scope(n);
    const auto par = interfere_plane_wave(field, tilt);
    CHECK(par.values == ref.values);
    CHECK(par.low_fringe_count == ref.low_fringe_count);
  }
}

TEST_CASE("Monte-Carlo oracle is bit-identical for any thread count") {
  const TwinBeamScenario sc{LumpedChannelSpec{2.0, 0.8, 0.7, LossPlacement::loss_after_gain}, 1000.0, 0.0};
  // Not a multiple of the chunk size, so the short last chunk is exercised.
  const std::int64_t samples = 5 * kMcChunkSize + 123;
  const auto ref = serial::mc_nsf_oracle(sc, samples, 99, McDetection{0.9, 0.95});
  for (int n : kThreadCounts) {
    ThreadScope scope(n);
    const auto par = mc_nsf_oracle(sc, samples, 99, McDetection{0.9, 0.95});
    CHECK(par.nsf == ref.nsf);
    CHECK(par.standard_error == ref.standard_error);
    CHECK(par.samples == ref.samples);
  }
}

TEST_CASE("sweep matches the serial reference") {
  SweepSettings s;
  s.delta_min_mhz = -30.0;
  s.delta_max_mhz = -10.0;
  s.delta_step_mhz = 2.5;
  const auto ref = serial::sweep_detuning(GainCurveModel{}, DetectionChain{}, s);
  REQUIRE(ref.size() == 9);
  for (int n : kThreadCounts) {
    ThreadScope scope(n);
    const auto par = sweep_detuning(GainCurveModel{}, DetectionChain{}, s);
    REQUIRE(par.size() == ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) {
      CHECK(par[k].delta_mhz == ref[k].delta_mhz);
      CHECK(par[k].gains.g_p == ref[k].gains.g_p);
      CHECK(par[k].gains.g_c == ref[k].gains.g_c);
      CHECK(par[k].fit_residual == ref[k].fit_residual);
      CHECK(par[k].difference.nsf_linear == ref[k].difference.nsf_linear);
      CHECK(par[k].attenuation.t_star == ref[k].attenuation.t_star);
      CHECK(par[k].attenuation.nsf_star == ref[k].attenuation.nsf_star);
    }
  }
}

TEST_CASE("sweep point count") {
  SweepSettings s;
  CHECK(sweep_point_count(s) == 67);
  s.delta_min_mhz = -28.0;
  s.delta_max_mhz = -7.0;
  CHECK(sweep_point_count(s) == 22);
  s.delta_step_mhz = 0.1;
  CHECK(sweep_point_count(s) == 211);
  s.delta_step_mhz = 100.0;
  CHECK(sweep_point_count(s) == 1);
}
