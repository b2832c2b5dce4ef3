#pragma once

// Frequency tiles on the curve (xi, xi^d), their dual physical tubes, and the
// dyadic cube hierarchies used to classify tubes against a variety.

#include <cstdint>
#include <vector>

#include "rlab/geometry.hpp"

namespace rlab {

struct CurveParams {
  double d = 3.0;  ///< curve exponent, >= 3
  int N = 1;       ///< number of tiles

  void validate() const;
};

/// An N^-1 x N^-d rectangle centred on the curve, long side tangent to it.
struct FreqRect {
  int index = 1;  ///< 1-based
  double xi = 1.0;
  Vec2 center;
  Vec2 tangent;  ///< unit, proportional to (1, d xi^(d-1))
  Vec2 normal;   ///< unit, (d xi^(d-1), -1) / |.|; the long axis of dual tubes
  double long_side = 1.0;
  double short_side = 1.0;

  /// Closed-rectangle membership; `rel_tol` is relative to each side.
  bool contains(Vec2 k, double rel_tol = 1e-9) const;
  /// Frequency rectangle scaled about its centre.
  FreqRect dilated(double factor) const;
  Polygon polygon() const;
};

std::vector<FreqRect> build_frequency_tiles(const CurveParams& params);

/// Physical rectangle of size length x width; `dir` is the long axis e(T).
struct Tube {
  Vec2 center;
  Vec2 dir{1.0, 0.0};
  double length = 1.0;
  double width = 1.0;
  int omega = -1;  ///< 1-based tile index, -1 when the tube is not tied to a tile
  std::int64_t lattice_long = 0;
  std::int64_t lattice_wide = 0;

  Vec2 across() const { return perp(dir); }
  Polygon polygon(double scale = 1.0) const { return oriented_rectangle(center, dir, length * scale, width * scale); }
  /// Closed membership in the `scale`-dilate about the centre.
  bool contains(Vec2 p, double scale = 1.0) const;
  /// Half-open lattice-cell membership; exactly one tube of a lattice owns each point.
  bool owns(Vec2 p) const;
  Tube dilated(double scale) const;
  /// Position along the long axis measured from the tube's start end.
  double along(Vec2 p) const { return dot(p - center, dir) + 0.5 * length; }
};

/// Disjoint tubes of size (1/short) x (1/long) whose long axis is the tile's
/// normal, anchored on the lattice through the origin, covering `region`.
std::vector<Tube> dual_tube_lattice(const FreqRect& omega, const Box& region);

/// Axis-aligned square.
struct Cube {
  Vec2 lo;
  double side = 1.0;

  Box box() const { return {lo, lo + Vec2{side, side}}; }
  Vec2 center() const { return lo + Vec2{0.5 * side, 0.5 * side}; }
  /// Concentric dilate, e.g. 3Q.
  Box dilated(double factor) const;
  bool operator==(const Cube&) const = default;
};

enum class ScaleMode { Xi, Delta };

/// Tiling of a root cube by n x n congruent dyadic sub-cubes.
struct CubeGrid {
  Cube root;
  double side = 1.0;
  std::int64_t per_axis = 1;
  int level = 0;  ///< log2(per_axis)

  std::size_t size() const { return static_cast<std::size_t>(per_axis * per_axis); }
  Cube cube(std::int64_t i, std::int64_t j) const;
  Cube cube(std::size_t flat) const { return cube(static_cast<std::int64_t>(flat) % per_axis, static_cast<std::int64_t>(flat) / per_axis); }
  std::vector<Cube> cubes() const;
  /// Flat index of the cube containing p (clamped to the root), -1 when outside.
  std::int64_t index_of(Vec2 p) const;
  /// Index ranges of cubes meeting a box, clamped; returns false when disjoint.
  bool index_range(const Box& b, std::int64_t& i0, std::int64_t& i1, std::int64_t& j0, std::int64_t& j1) const;
};

struct ScaleParams {
  double R = 2.0;
  double d = 3.0;
  double delta = 0.1;
};

/// The tiling of `root` at a dyadic scale: side root/Xi (Xi mode) or
/// root/(R^(d-2) Delta) (Delta mode). Only dyadicity and Xi <= R^(d-2) are
/// enforced here; the Delta admissibility window is enforced by classify().
CubeGrid cube_grid(const Cube& root, double scale, ScaleMode mode, const ScaleParams& params);

/// The dyadic cube of doubled side containing q. Throws when q is the root.
Cube parent_cube(const Cube& q, const CubeGrid& grid);

bool is_dyadic(double x);
/// Smallest root cube, centred at the origin, of side 2^k with R^d <= 2^k, holding B(R^d).
Cube root_cube(double R, double d);

}  // namespace rlab
