#pragma once

// Pixel grids over a box, sign grids of sampled functions, and a vector
// distance transform to their zero crossings.

#include <cstdint>
#include <vector>

#include "rlab/parallel.hpp"
#include "rlab/polynomial.hpp"

namespace rlab {

/// nx x ny pixels tiling `domain`; samples live at pixel centres.
struct GridSpec {
  Box domain;
  std::size_t nx = 1;
  std::size_t ny = 1;

  double hx() const { return domain.width() / static_cast<double>(nx); }
  double hy() const { return domain.height() / static_cast<double>(ny); }
  double pixel_area() const { return hx() * hy(); }
  std::size_t size() const { return nx * ny; }
  std::size_t flat(std::size_t i, std::size_t j) const { return j * nx + i; }
  Vec2 center(std::size_t i, std::size_t j) const {
    return {domain.lo.x + (static_cast<double>(i) + 0.5) * hx(), domain.lo.y + (static_cast<double>(j) + 0.5) * hy()};
  }
  Vec2 center(std::size_t k) const { return center(k % nx, k / nx); }
  /// Pixel containing p; false when p is outside the domain.
  bool locate(Vec2 p, std::size_t& i, std::size_t& j) const;
  void validate() const;
};

std::vector<double> sample_on_grid(const Polynomial2& P, const GridSpec& grid, Exec exec = Exec::parallel);

/// Zero crossings of sampled functions, by linear interpolation along the
/// edges between 4-neighbour pixel centres where the sign flips.
struct CrossingSet {
  std::vector<Vec2> points;
  /// For each crossing: the two pixel indices of the edge.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

CrossingSet zero_crossings(const GridSpec& grid, const std::vector<double>& values);

struct DistanceMap {
  GridSpec grid;
  std::vector<double> dist;          ///< distance from each pixel centre to the nearest seed
  std::vector<std::uint8_t> touches; ///< pixel lies on a sign-change edge or samples an exact zero

  double at(Vec2 p) const;
};

/// Two-pass vector propagation of nearest-seed positions. Seeds: every
/// crossing point, attached to both pixels of its edge, plus centres of pixels
/// where some function vanishes exactly.
DistanceMap distance_to_crossings(const GridSpec& grid, const std::vector<const std::vector<double>*>& fields);

}  // namespace rlab
