#pragma once

#include <cstdint>
#include <vector>

#include "rlab/field.hpp"

namespace rlab {

/// sin^2(pi t) / (pi t)^2; translates by integers sum to 1.
double sinc2(double t);

/// Periodised sinc^2 with period K: sin^2(pi t) / (K^2 sin^2(pi t / K)).
/// Its K integer translates sum to 1 exactly and its Fourier coefficients
/// vanish at |frequency| >= 1.
double fejer_periodic(double t, std::int64_t K);

/// phi_T on the tube's tile frame (no carrier): product of periodic Fejer
/// kernels in the tube's across and along coordinates, scaled to W and L.
Field make_bump(const TileFrame& frame, const Tube& tube);
/// Same, building the frame for tile T.omega of the curve.
Field make_bump(const Tube& tube, const CurveParams& curve, int oversample = 8);

/// Sampled across/along profiles whose outer product is the bump.
struct BumpProfile {
  std::vector<double> u;
  std::vector<double> v;
};
BumpProfile bump_profile(const TileFrame& frame, const Tube& tube);

struct WavePacket {
  std::size_t part = 0;  ///< index into TiledField::parts
  int omega = 0;         ///< 1-based tile index
  Tube tube;
  double mass = 0.0;  ///< ||f_T||_2 over the frame torus
};

struct DecomposeOptions {
  /// Packets lighter than this fraction of ||f||_2 are dropped.
  double drop_fraction = 1e-12;
  /// When set, only tubes meeting the region are kept.
  bool use_region = false;
  Box region;
  Exec exec = Exec::parallel;
};

/// f_T = f_omega phi_T for every lattice tube of every tile part.
std::vector<WavePacket> decompose(const TiledField& f, const DecomposeOptions& opt = {});

/// Samples of f_T on its frame (carrier c_omega).
Field packet_field(const TiledField& f, const WavePacket& packet);

/// sum_T f_T, grouped per tile part.
TiledField reconstruct(const TiledField& f, const std::vector<WavePacket>& packets);

/// amplitude * phi_T * e(c_omega . x) on the tile frame.
Field single_wavepacket(const TileFrame& frame, const Tube& tube, double amplitude);

/// Tile frames for every tile of the curve.
std::vector<TileFrame> tile_frames(const CurveParams& curve, int oversample = 8);

/// Splits a world-grid field into tile parts: each f_omega is cut out on the
/// world grid, then evaluated exactly (as a finite sum of grid modes) on the
/// tile's frame.
TiledField tile_world_field(const Field& world, const CurveParams& curve, int oversample = 8, Exec exec = Exec::parallel);

/// Fraction of the L2 mass of a frame field inside the `dilation`-dilate of a tube.
double mass_fraction_in(const Field& f, const Tube& tube, double dilation);

}  // namespace rlab
