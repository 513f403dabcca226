#include "twinbeam/lg_mode.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "twinbeam/error.hpp"

namespace twinbeam {

namespace {

using cplx = std::complex<double>;

void validate(const LGModeSpec& spec) {
  if (spec.p < 0) throw ValidationError("LG radial index p must be >= 0");
  if (!(spec.waist_um > 0.0)) throw ValidationError("LG waist must be > 0");
  if (!(spec.wavelength_nm > 0.0)) throw ValidationError("LG wavelength must be > 0");
}

// Beam parameters at distance z, shared by every pixel.
struct BeamAt {
  int l;
  unsigned abs_l;
  unsigned p;
  double w;
  double norm;         // sqrt(2 p! / (pi (p+|l|)!)) / w
  double inv_radius;   // 1/R(z), 0 at the waist
  double k;            // wavenumber, rad/um
  double gouy;         // (2p + |l| + 1) atan(z/zR)
};

BeamAt beam_at(const LGModeSpec& spec, double z) {
  const double lambda_um = spec.wavelength_nm * 1e-3;
  const double zr = std::numbers::pi * spec.waist_um * spec.waist_um / lambda_um;
  const double w = spec.waist_um * std::sqrt(1.0 + (z / zr) * (z / zr));
  const unsigned abs_l = static_cast<unsigned>(std::abs(spec.l));
  const unsigned p = static_cast<unsigned>(spec.p);
  const double log_ratio = std::lgamma(p + 1.0) - std::lgamma(p + abs_l + 1.0);
  return {spec.l,
          abs_l,
          p,
          w,
          std::sqrt(2.0 / std::numbers::pi * std::exp(log_ratio)) / w,
          z == 0.0 ? 0.0 : z / (z * z + zr * zr),
          2.0 * std::numbers::pi / lambda_um,
          (2.0 * p + abs_l + 1.0) * std::atan(z / zr)};
}

inline cplx lg_sample(const BeamAt& b, double x, double y) {
  const double r2 = x * x + y * y;
  const double rho2 = 2.0 * r2 / (b.w * b.w);
  const double radial = b.norm * std::pow(std::sqrt(rho2), b.abs_l) *
                        std::assoc_laguerre(b.p, b.abs_l, rho2) * std::exp(-r2 / (b.w * b.w));
  const double phase = b.l * std::atan2(y, x) - 0.5 * b.k * r2 * b.inv_radius + b.gouy;
  return std::polar(radial, phase);
}

FieldMap make_field_map(const GridGeometry& g) {
  FieldMap f;
  f.geometry = g;
  f.values.resize(g.resolution * g.resolution);
  return f;
}

void finish_field_map(FieldMap& f) {
  double sum = 0.0;
  for (const auto& v : f.values) sum += std::norm(v);
  const double px = f.geometry.pixel_um();
  f.captured_power = sum * px * px;
  f.clipped = f.captured_power < 0.99;
}

struct Interference {
  double scale;  // 1 / peak |field|
  Tilt tilt;

  double operator()(const GridGeometry& g, std::size_t row, std::size_t col, cplx u) const {
    const double x = g.coord(col);
    const double y = g.coord(row);
    return std::norm(scale * u + std::polar(1.0, tilt.kx * x + tilt.ky * y));
  }
};

Interference make_interference(const FieldMap& field, const Tilt& tilt) {
  validate(field.geometry);
  double peak = 0.0;
  for (const auto& v : field.values) peak = std::max(peak, std::abs(v));
  if (!(peak > 0.0)) throw PreconditionError("cannot interfere an all-zero field");
  return {1.0 / peak, tilt};
}

bool few_fringes(const GridGeometry& g, const Tilt& tilt) {
  const double k = std::hypot(tilt.kx, tilt.ky);
  return k * 2.0 * g.extent_um / (2.0 * std::numbers::pi) < 4.0;
}

// Bilinear interpolation of a complex grid at physical (x, y).
template <typename Grid>
cplx sample_bilinear(const GridGeometry& g, const Grid& at, double x, double y) {
  const double px = g.pixel_um();
  const double fx = (x + g.extent_um) / px - 0.5;
  const double fy = (y + g.extent_um) / px - 0.5;
  const auto n = static_cast<double>(g.resolution);
  if (fx < 0.0 || fy < 0.0 || fx > n - 1.0 || fy > n - 1.0)
    throw ValidationError("sampling circle leaves the grid");
  const auto j0 = std::min(static_cast<std::size_t>(fx), g.resolution - 2);
  const auto i0 = std::min(static_cast<std::size_t>(fy), g.resolution - 2);
  const double tx = fx - static_cast<double>(j0);
  const double ty = fy - static_cast<double>(i0);
  return (1 - ty) * ((1 - tx) * at(i0, j0) + tx * at(i0, j0 + 1)) +
         ty * ((1 - tx) * at(i0 + 1, j0) + tx * at(i0 + 1, j0 + 1));
}

// Accumulated phase of `at` around a circle of radius r, in turns.
template <typename Grid>
double winding(const GridGeometry& g, const Grid& at, double r, double min_amplitude) {
  const std::size_t m = std::max<std::size_t>(360, 8 * g.resolution);
  double total = 0.0;
  cplx prev = sample_bilinear(g, at, r, 0.0);
  if (std::abs(prev) < min_amplitude) throw PreconditionError("field amplitude too small on the sampling circle");
  for (std::size_t k = 1; k <= m; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
    const cplx cur = sample_bilinear(g, at, r * std::cos(theta), r * std::sin(theta));
    if (std::abs(cur) < min_amplitude)
      throw PreconditionError("field amplitude too small on the sampling circle");
    total += std::arg(cur * std::conj(prev));
    prev = cur;
  }
  return total / (2.0 * std::numbers::pi);
}

}  // namespace

void validate(const GridGeometry& g) {
  if (g.resolution < kMinResolution) {
    std::ostringstream msg;
    msg << "grid resolution must be >= " << kMinResolution;
    throw ValidationError(msg.str());
  }
  if (!(g.extent_um > 0.0) || !std::isfinite(g.extent_um)) throw ValidationError("grid extent must be > 0");
}

Tilt tilt_for_fringes(const GridGeometry& geometry, double fringes) {
  return {2.0 * std::numbers::pi * fringes / (2.0 * geometry.extent_um), 0.0};
}

FieldMap lg_field(const LGModeSpec& spec, const GridGeometry& geometry, double z_um) {
  validate(spec);
  validate(geometry);
  const auto b = beam_at(spec, z_um);
  auto f = make_field_map(geometry);
  const auto n = static_cast<std::ptrdiff_t>(geometry.resolution);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double y = geometry.coord(static_cast<std::size_t>(i));
    for (std::ptrdiff_t j = 0; j < n; ++j)
      f.values[static_cast<std::size_t>(i * n + j)] = lg_sample(b, geometry.coord(static_cast<std::size_t>(j)), y);
  }
  finish_field_map(f);
  return f;
}

std::vector<double> intensity(const FieldMap& field) {
  std::vector<double> out(field.values.size());
  std::transform(field.values.begin(), field.values.end(), out.begin(),
                 [](const cplx& v) { return std::norm(v); });
  return out;
}

ImageGrid interfere_plane_wave(const FieldMap& field, const Tilt& tilt) {
  const auto op = make_interference(field, tilt);
  const auto& g = field.geometry;
  ImageGrid img{g, std::vector<double>(field.values.size()), few_fringes(g, tilt)};
  const auto n = static_cast<std::ptrdiff_t>(g.resolution);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      const auto idx = static_cast<std::size_t>(i * n + j);
      img.values[idx] = op(g, static_cast<std::size_t>(i), static_cast<std::size_t>(j), field.values[idx]);
    }
  return img;
}

int topological_charge(const FieldMap& field, double radius_fraction) {
  validate(field.geometry);
  if (!(radius_fraction > 0.0)) throw ValidationError("sampling radius must be > 0");
  double peak = 0.0;
  for (const auto& v : field.values) peak = std::max(peak, std::abs(v));
  const auto at = [&](std::size_t i, std::size_t j) { return field.at(i, j); };
  const double turns = winding(field.geometry, at, radius_fraction * field.geometry.extent_um, 1e-6 * peak);
  return static_cast<int>(std::lround(turns));
}

int fork_dislocation(const ImageGrid& image, const Tilt& tilt) {
  const auto& g = image.geometry;
  validate(g);
  const auto n = g.resolution;
  const double px = g.pixel_um();

  // Carrier removal: I * exp(i k.r) leaves the field at baseband plus
  // components at k and 2k, which the one-period box average suppresses.
  std::vector<cplx> demod(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      demod[i * n + j] = image.at(i, j) * std::polar(1.0, tilt.kx * g.coord(j) + tilt.ky * g.coord(i));

  auto box_len = [&](double k) -> std::size_t {
    if (std::abs(k) < 1e-12) return 1;
    const auto len = static_cast<std::size_t>(std::lround(2.0 * std::numbers::pi / std::abs(k) / px));
    return std::clamp<std::size_t>(len, 1, n / 4);
  };
  const std::size_t bx = box_len(tilt.kx);
  const std::size_t by = box_len(tilt.ky);

  auto box_filter = [n](const std::vector<cplx>& in, std::size_t len, bool along_x) {
    std::vector<cplx> out(in.size());
    const auto half = static_cast<std::ptrdiff_t>(len / 2);
    const auto sn = static_cast<std::ptrdiff_t>(n);
    for (std::ptrdiff_t i = 0; i < sn; ++i)
      for (std::ptrdiff_t j = 0; j < sn; ++j) {
        cplx acc = 0.0;
        std::size_t count = 0;
        for (std::ptrdiff_t o = -half; o < -half + static_cast<std::ptrdiff_t>(len); ++o) {
          const auto ii = along_x ? i : i + o;
          const auto jj = along_x ? j + o : j;
          if (ii < 0 || jj < 0 || ii >= sn || jj >= sn) continue;
          acc += in[static_cast<std::size_t>(ii * sn + jj)];
          ++count;
        }
        out[static_cast<std::size_t>(i * sn + j)] = acc / static_cast<double>(count);
      }
    return out;
  };
  auto base = box_filter(box_filter(demod, bx, true), by, false);

  double peak = 0.0;
  for (const auto& v : base) peak = std::max(peak, std::abs(v));
  const auto at = [&](std::size_t i, std::size_t j) { return base[i * n + j]; };

  // Majority vote over a few loop radii around the core.
  std::vector<int> votes;
  for (double frac : {0.15, 0.2, 0.25, 0.3}) {
    try {
      votes.push_back(static_cast<int>(std::lround(winding(g, at, frac * g.extent_um, 1e-3 * peak))));
    } catch (const PreconditionError&) {
    }
  }
  if (votes.empty()) throw PreconditionError("no usable loop around the fork core");
  std::sort(votes.begin(), votes.end());
  int best = votes.front();
  std::size_t best_count = 0;
  for (std::size_t a = 0; a < votes.size();) {
    std::size_t b = a;
    while (b < votes.size() && votes[b] == votes[a]) ++b;
    if (b - a > best_count) {
      best_count = b - a;
      best = votes[a];
    }
    a = b;
  }
  return best;
}

bool check_oam_conservation(int l_pump, int l_probe, int l_conj) { return 2 * l_pump == l_probe + l_conj; }

namespace serial {

FieldMap lg_field(const LGModeSpec& spec, const GridGeometry& geometry, double z_um) {
  validate(spec);
  validate(geometry);
  const auto b = beam_at(spec, z_um);
  auto f = make_field_map(geometry);
  for (std::size_t i = 0; i < geometry.resolution; ++i)
    for (std::size_t j = 0; j < geometry.resolution; ++j)
      f.values[i * geometry.resolution + j] = lg_sample(b, geometry.coord(j), geometry.coord(i));
  finish_field_map(f);
  return f;
}

ImageGrid interfere_plane_wave(const FieldMap& field, const Tilt& tilt) {
  const auto op = make_interference(field, tilt);
  const auto& g = field.geometry;
  ImageGrid img{g, std::vector<double>(field.values.size()), few_fringes(g, tilt)};
  for (std::size_t i = 0; i < g.resolution; ++i)
    for (std::size_t j = 0; j < g.resolution; ++j)
      img.values[i * g.resolution + j] = op(g, i, j, field.values[i * g.resolution + j]);
  return img;
}

}  // namespace serial

}  // namespace twinbeam
