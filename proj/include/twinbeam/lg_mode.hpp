#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace twinbeam {

/// Laguerre-Gaussian mode LG_{p,l}. Lengths in micrometres, wavelength in nm.
struct LGModeSpec {
  int l = 0;
  int p = 0;
  double waist_um = 370.0;
  double wavelength_nm = 894.6;
};

/// Square sampling grid centred on the beam axis. Pixel (i, j) has its centre
/// at x = -extent + (j + 1/2) * pixel, y = -extent + (i + 1/2) * pixel; row i
/// runs along y.
struct GridGeometry {
  double extent_um = 0.0;  ///< half width
  std::size_t resolution = 0;

  double pixel_um() const { return 2.0 * extent_um / static_cast<double>(resolution); }
  double coord(std::size_t k) const { return -extent_um + (static_cast<double>(k) + 0.5) * pixel_um(); }
};

inline constexpr std::size_t kMinResolution = 64;

void validate(const GridGeometry& geometry);

struct FieldMap {
  GridGeometry geometry;
  /// Row-major complex amplitudes, units 1/um so that sum |u|^2 dA = 1.
  std::vector<std::complex<double>> values;
  /// Discrete sum |u|^2 * pixel area.
  double captured_power = 0.0;
  /// Set when captured_power < 0.99: the grid clips the mode.
  bool clipped = false;

  const std::complex<double>& at(std::size_t row, std::size_t col) const {
    return values[row * geometry.resolution + col];
  }
};

struct ImageGrid {
  GridGeometry geometry;
  std::vector<double> values;  ///< row-major, >= 0
  /// Fewer than 4 carrier fringes across the aperture (includes zero tilt).
  bool low_fringe_count = false;

  double at(std::size_t row, std::size_t col) const { return values[row * geometry.resolution + col]; }
};

/// Transverse wavevector of the reference plane wave, rad/um.
struct Tilt {
  double kx = 0.0;
  double ky = 0.0;
};

/// Tilt along x giving `fringes` carrier fringes across the full aperture.
Tilt tilt_for_fringes(const GridGeometry& geometry, double fringes);

/// Normalized LG field sampled at distance z from the waist (z = 0: waist plane).
/// Azimuthal phase is exp(+i l phi) with phi = atan2(y, x).
FieldMap lg_field(const LGModeSpec& spec, const GridGeometry& geometry, double z_um = 0.0);

std::vector<double> intensity(const FieldMap& field);

/// Interference of the field, rescaled to unit peak amplitude, with the unit
/// plane wave exp(i (kx x + ky y)).
ImageGrid interfere_plane_wave(const FieldMap& field, const Tilt& tilt);

/// Winding number of the field phase around a circle of radius
/// `radius_fraction * extent`, counter-clockwise. Throws ValidationError when
/// the circle leaves the grid and PreconditionError when the amplitude on the
/// circle drops below 1e-6 of the field's peak amplitude.
int topological_charge(const FieldMap& field, double radius_fraction);

/// Signed dislocation order of a fork interferogram.
///
/// Demodulates the fringes with the known carrier (multiply by exp(i k.r),
/// box-average over one fringe period), then counts the phase winding of the
/// recovered field around the image centre. |result| is the number of extra
/// fringes at the fork; the sign gives the fork orientation.
int fork_dislocation(const ImageGrid& image, const Tilt& tilt);

/// Two pump photons are absorbed per probe/conjugate pair.
bool check_oam_conservation(int l_pump, int l_probe, int l_conj);

namespace serial {
FieldMap lg_field(const LGModeSpec& spec, const GridGeometry& geometry, double z_um = 0.0);
ImageGrid interfere_plane_wave(const FieldMap& field, const Tilt& tilt);
}  // namespace serial

}  // namespace twinbeam
