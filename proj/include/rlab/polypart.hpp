#pragma once

#include <cstdint>
#include <vector>

#include "rlab/distance_field.hpp"
#include "rlab/curve_tiles.hpp"
#include "rlab/field.hpp"

namespace rlab {

/// Weighted points. A nonnegative density on a grid is represented by its
/// pixel centres weighted by density times pixel area.
struct MassDistribution {
  std::vector<Vec2> points;
  std::vector<double> weights;

  static MassDistribution uniform_points(std::vector<Vec2> pts);
  static MassDistribution from_density(const GridSpec& grid, const std::vector<double>& density);
  /// |f|^2 sampled on the field grid.
  static MassDistribution from_field(const Field& f);
  double total() const;
  void validate() const;
};

struct BisectOptions {
  double tolerance = 0.02;
  int max_restarts = 64;
  int batch = 8;  ///< restarts run concurrently; the best of the first successful batch wins
  Exec exec = Exec::parallel;
};

struct BisectResult {
  Polynomial2 poly;
  double imbalance = 1.0;  ///< max over masses of |mu+ - mu-| / mu
  std::vector<double> per_mass;
  std::uint64_t start = 0;  ///< index of the winning restart
};

/// Signed imbalance (mu+ - mu-)/mu of one mass; points on Z(P) count half to each side.
double signed_imbalance(const Polynomial2& P, const MassDistribution& m);

/// Smallest k with (k+1)(k+2)/2 - 1 >= m.
int min_bisect_degree(std::size_t masses);

/// Finds P of degree `degree` on the unit coefficient sphere splitting every
/// mass within the tolerance. Throws BisectError carrying the best imbalance.
BisectResult bisect(const std::vector<MassDistribution>& masses, int degree, std::uint64_t seed, const BisectOptions& opt = {});

struct PartitionOptions {
  std::size_t grid_n = 1024;
  BisectOptions bisect;
  double singular_rel = 1e-6;
  double eps_start = 1e-9;
  int max_doublings = 40;
};

struct Partition {
  Polynomial2 polynomial;            ///< product of the factors
  std::vector<Polynomial2> factors;  ///< one per bisection level
  GridSpec grid;
  /// Per pixel: cell label, or -1 where a factor vanishes at the sample.
  std::vector<int> label;
  /// Sign-vector code of each label (bit k set when factor k is positive).
  std::vector<std::uint32_t> cell_code;
  /// Per point of the input mass: cell label, or -1 on Z(P).
  std::vector<int> point_cell;
  std::vector<double> masses;  ///< per label
  double wall_mass = 0.0;      ///< input mass sitting on Z(P)
  std::vector<int> component;  ///< per pixel: 4-connected component id, -1 on Z(P)
  int num_components = 0;
  double perturbation = 0.0;   ///< epsilon used to make the factors non-singular
  int thin_cells = 0;          ///< cells with fewer than 4 pixels (grid too coarse)
  DistanceMap distance;        ///< distance to Z(P) from every pixel centre

  std::size_t num_cells() const { return cell_code.size(); }
  /// Cell label of a point (exact sign evaluation), -1 on Z(P), -2 for an unseen sign vector.
  int cell_of(Vec2 p) const;
  std::uint32_t code_of(Vec2 p, bool& on_zero) const;
};

/// Iterated simultaneous bisection of `mass` until the degree budget D is used up.
Partition partition(const MassDistribution& mass, int D, const Box& domain, std::uint64_t seed, const PartitionOptions& opt = {});

/// Cells, components and distance map of a given polynomial (one factor, no masses).
Partition partition_of(const Polynomial2& P, const Box& domain, std::size_t grid_n = 1024);

/// Pixel mask of the rho-neighbourhood of Z(P); always contains the sign-change pixels.
std::vector<std::uint8_t> wall(const Partition& part, double rho);
double mask_area(const GridSpec& grid, const std::vector<std::uint8_t>& mask);

/// Number of distinct cells met by the tube's central axis inside the grid domain.
int tube_cell_incidence(const Partition& part, const Tube& tube);
/// Same for an arbitrary segment.
int segment_cell_incidence(const Partition& part, Vec2 a, Vec2 b);

/// P(x) = Q((x - c) / s): expresses a polynomial given in normalised coordinates.
Polynomial2 affine_substitute(const Polynomial2& Q, Vec2 c, double s);

}  // namespace rlab
