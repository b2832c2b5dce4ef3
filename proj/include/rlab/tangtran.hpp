#pragma once

// Wall and cell integrals of |sum f_omega|^p after the tangential/transverse
// split of the wave packets.

#include <cstdint>
#include <vector>

#include "rlab/config.hpp"
#include "rlab/polypart.hpp"
#include "rlab/variety.hpp"
#include "rlab/wavepacket.hpp"

namespace rlab {

struct TangTranTerm {
  double scale = 1.0;
  ScaleMode mode = ScaleMode::Xi;
  bool complement = false;
  double value = 0.0;  ///< sum over cubes of the integral over W cap Q of |sum_class f_T|^p
  std::size_t classes = 0;
  std::size_t memberships = 0;
};

struct TangTranRecord {
  double total = 0.0;          ///< integral over B(R^d) of |f|^p
  double cell_term = 0.0;      ///< same over B minus W, i.e. the union of the pruned cells
  double wall_integral = 0.0;  ///< same over B cap W
  std::vector<TangTranTerm> tang;
  std::vector<TangTranTerm> tran;
  double residual = 0.0;  ///< total - cell - sum tang - sum tran; cross terms make it nonzero
  double relative_residual = 0.0;
  std::size_t packets = 0;
  std::size_t cell_tubes = 0;
  std::size_t samples = 0;
  bool complement_at_xi = false;
  /// Wall estimate reported two-sided: (wall integral)^(1/p) against D R^(-d/2+3 delta) ||f||_2.
  double wall_lp = 0.0;
  double wall_rhs = 0.0;
};

struct TangTranOptions {
  std::size_t cells = 256;  ///< cells^2 stratified points over the ball
  std::uint64_t seed = 1;
  double drop_fraction = 1e-6;  ///< lighter packets are left out of the split (not out of f)
  Exec exec = Exec::parallel;
};

/// R is the tile count of f (tube width); the partition must cover the root cube
/// and its wall radius is R^(1+delta).
TangTranRecord compute_tang_tran(const RunConfig& config, const TiledField& f, const Partition& part, const TangTranOptions& opt = {});

/// Polynomial partition of |f|^2 sampled on a density_n^2 pixel grid of the
/// root cube of f's scale.
Partition field_partition(const TiledField& f, double d, int D, std::uint64_t seed, std::size_t density_n = 384,
                          const PartitionOptions& opt = {});

/// phi_T at a world point, for a tube of frame fr.
double bump_at(const TileFrame& fr, const Tube& T, Vec2 x);

}  // namespace rlab
