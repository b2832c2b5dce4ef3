#pragma once

// Complex fields sampled on uniform grids. A grid may be rotated (axis u and
// v = perp(u)), anisotropic (spacings hu, hv) and carry a plane-wave carrier:
// the value at grid point (i, j) is data[j*nu + i] * e(carrier . x_ij), where
// e(t) = exp(2 pi i t). Keeping the carrier out of the samples lets a field
// concentrated near a high frequency live on a coarse grid.

#include <complex>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "rlab/curve_tiles.hpp"
#include "rlab/fft.hpp"
#include "rlab/parallel.hpp"

namespace rlab {

inline cd expi2pi(double t) {
  const double a = 2.0 * M_PI * (t - std::round(t));
  return {std::cos(a), std::sin(a)};
}

struct Field {
  Vec2 origin;
  Vec2 axis{1.0, 0.0};
  double hu = 1.0;
  double hv = 1.0;
  std::size_t nu = 1;
  std::size_t nv = 1;
  Vec2 carrier;
  std::vector<cd> data;

  /// Axis-aligned isotropic grid of zeros.
  static Field zeros(Vec2 origin, double spacing, std::size_t nx, std::size_t ny);
  static Field on_frame(Vec2 origin, Vec2 axis, double hu, double hv, std::size_t nu, std::size_t nv, Vec2 carrier);

  void validate() const;
  std::size_t size() const { return nu * nv; }
  Vec2 vaxis() const { return perp(axis); }
  double cell_area() const { return hu * hv; }
  cd& at(std::size_t i, std::size_t j) { return data[j * nu + i]; }
  const cd& at(std::size_t i, std::size_t j) const { return data[j * nu + i]; }
  Vec2 position(std::size_t i, std::size_t j) const {
    return origin + axis * (static_cast<double>(i) * hu) + vaxis() * (static_cast<double>(j) * hv);
  }
  Vec2 position(std::size_t flat) const { return position(flat % nu, flat / nu); }
  /// Sample including the carrier.
  cd value(std::size_t flat) const { return data[flat] * expi2pi(dot(carrier, position(flat))); }
  /// Periodic Catmull-Rom interpolation of the baseband samples, times the carrier.
  cd eval(Vec2 p) const;
  /// World frequency of DFT bin (ku, kv).
  Vec2 frequency(std::size_t ku, std::size_t kv) const;
  bool axis_aligned_isotropic() const { return axis == Vec2{1.0, 0.0} && hu == hv; }
  bool same_grid(const Field& o) const;

  Field& operator*=(cd s);
  Field& operator+=(const Field& o);
};

/// L2 norm over one period of the grid (Riemann sum).
double l2_norm(const Field& f, Exec exec = Exec::parallel);

/// Sharp cutoff to the frequency rectangle: FFT, multiply by 1_omega, inverse FFT.
/// Throws ResolutionError when omega does not fit the grid's Nyquist box or
/// 2 omega spans fewer than 8 frequency samples across its short side.
Field restrict_frequency(const Field& f, const FreqRect& omega);
void check_resolves(const Field& f, const FreqRect& omega);

/// Binary layout, little-endian: origin.x, origin.y, spacing (f64), nx, ny
/// (u64), then nx*ny row-major (re, im) f64 pairs with the carrier applied.
void write_field_binary(const Field& f, const std::filesystem::path& path);
Field read_field_binary(const std::filesystem::path& path);
/// Rows "x,y,re,im" with a header line.
void write_field_csv(const Field& f, const std::filesystem::path& path);

/// Rotated torus attached to one frequency tile: u = tangent, v = normal, so
/// the tile's dual tubes are exactly the grid-aligned lattice cells of size
/// W x L (W = 1/long side, L = 1/short side). Period: W*ku_cells by L*kv_cells,
/// centred on the world origin.
struct TileFrame {
  FreqRect omega;
  double L = 1.0;
  double W = 1.0;
  int oversample = 8;
  std::int64_t ku_cells = 2;
  std::int64_t kv_cells = 4;

  double period_u() const { return W * static_cast<double>(ku_cells); }
  double period_v() const { return L * static_cast<double>(kv_cells); }
  /// Zero field on this frame with carrier at omega's centre.
  Field blank() const;
  /// Every tube of the lattice on the torus.
  std::vector<Tube> tubes() const;
};

/// ku_cells is the even number >= 4L/W, kv_cells = 4, so the torus holds B(2L).
TileFrame make_tile_frame(const FreqRect& omega, int oversample = 8);

/// Sum over tiles of per-tile frame fields; evaluation sums the interpolants.
struct TiledField {
  std::vector<TileFrame> frames;
  std::vector<Field> parts;

  cd eval(Vec2 p) const;
  /// sqrt(sum_omega ||part||_2^2) over each frame's torus.
  double l2_norm(Exec exec = Exec::parallel) const;
  TiledField& operator*=(cd s);
};

}  // namespace rlab
