#include "rlab/curve_tiles.hpp"

#include <cmath>
#include <string>

#include "rlab/error.hpp"

namespace rlab {

void CurveParams::validate() const {
  if (!(d >= 3.0)) throw ValidationError("curve exponent d must be >= 3 (got " + std::to_string(d) + ")");
  if (N < 1) throw ValidationError("tile count N must be >= 1 (got " + std::to_string(N) + ")");
}

bool FreqRect::contains(Vec2 k, double rel_tol) const {
  const Vec2 r = k - center;
  return std::abs(dot(r, tangent)) <= 0.5 * long_side * (1.0 + rel_tol) &&
         std::abs(dot(r, normal)) <= 0.5 * short_side * (1.0 + rel_tol);
}

FreqRect FreqRect::dilated(double factor) const {
  FreqRect w = *this;
  w.long_side *= factor;
  w.short_side *= factor;
  return w;
}

Polygon FreqRect::polygon() const { return oriented_rectangle(center, tangent, long_side, short_side); }

std::vector<FreqRect> build_frequency_tiles(const CurveParams& params) {
  params.validate();
  const double n = params.N;
  std::vector<FreqRect> tiles;
  tiles.reserve(static_cast<std::size_t>(params.N));
  for (int j = 1; j <= params.N; ++j) {
    FreqRect w;
    w.index = j;
    w.xi = 1.0 + (j - 1) / n;
    w.center = {w.xi, std::pow(w.xi, params.d)};
    const double slope = params.d * std::pow(w.xi, params.d - 1.0);
    w.tangent = normalized({1.0, slope});
    w.normal = normalized({slope, -1.0});
    w.long_side = 1.0 / n;
    w.short_side = std::pow(n, -params.d);
    tiles.push_back(w);
  }
  return tiles;
}

bool Tube::contains(Vec2 p, double scale) const {
  const Vec2 r = p - center;
  return std::abs(dot(r, dir)) <= 0.5 * length * scale && std::abs(dot(r, across())) <= 0.5 * width * scale;
}

bool Tube::owns(Vec2 p) const {
  const auto k = static_cast<std::int64_t>(std::floor(dot(p, dir) / length + 0.5));
  const auto m = static_cast<std::int64_t>(std::floor(dot(p, across()) / width + 0.5));
  return k == lattice_long && m == lattice_wide;
}

Tube Tube::dilated(double scale) const {
  Tube t = *this;
  t.length *= scale;
  t.width *= scale;
  return t;
}

std::vector<Tube> dual_tube_lattice(const FreqRect& omega, const Box& region) {
  if (region.empty()) throw ValidationError("dual_tube_lattice: empty region");
  const double len = 1.0 / omega.short_side;
  const double wid = 1.0 / omega.long_side;
  const Vec2 e = omega.normal;
  const Vec2 a = perp(e);
  double smin = INFINITY, smax = -INFINITY, rmin = INFINITY, rmax = -INFINITY;
  for (Vec2 c : box_polygon(region)) {
    smin = std::min(smin, dot(c, e));
    smax = std::max(smax, dot(c, e));
    rmin = std::min(rmin, dot(c, a));
    rmax = std::max(rmax, dot(c, a));
  }
  const auto k0 = static_cast<std::int64_t>(std::floor(smin / len + 0.5));
  const auto k1 = static_cast<std::int64_t>(std::floor(smax / len + 0.5));
  const auto m0 = static_cast<std::int64_t>(std::floor(rmin / wid + 0.5));
  const auto m1 = static_cast<std::int64_t>(std::floor(rmax / wid + 0.5));
  const Polygon rp = box_polygon(region);
  const bool point_region = region.width() == 0.0 && region.height() == 0.0;
  std::vector<Tube> tubes;
  for (std::int64_t k = k0; k <= k1; ++k) {
    for (std::int64_t m = m0; m <= m1; ++m) {
      Tube t;
      t.center = e * (static_cast<double>(k) * len) + a * (static_cast<double>(m) * wid);
      t.dir = e;
      t.length = len;
      t.width = wid;
      t.omega = omega.index;
      t.lattice_long = k;
      t.lattice_wide = m;
      if (point_region || convex_overlap(t.polygon(), rp)) tubes.push_back(t);
    }
  }
  return tubes;
}

Box Cube::dilated(double factor) const {
  const Vec2 c = center();
  const double h = 0.5 * side * factor;
  return {c - Vec2{h, h}, c + Vec2{h, h}};
}

Cube CubeGrid::cube(std::int64_t i, std::int64_t j) const {
  return {root.lo + Vec2{static_cast<double>(i) * side, static_cast<double>(j) * side}, side};
}

std::vector<Cube> CubeGrid::cubes() const {
  std::vector<Cube> out;
  out.reserve(size());
  for (std::int64_t j = 0; j < per_axis; ++j)
    for (std::int64_t i = 0; i < per_axis; ++i) out.push_back(cube(i, j));
  return out;
}

std::int64_t CubeGrid::index_of(Vec2 p) const {
  if (!root.box().contains(p)) return -1;
  auto i = static_cast<std::int64_t>(std::floor((p.x - root.lo.x) / side));
  auto j = static_cast<std::int64_t>(std::floor((p.y - root.lo.y) / side));
  i = std::clamp<std::int64_t>(i, 0, per_axis - 1);
  j = std::clamp<std::int64_t>(j, 0, per_axis - 1);
  return j * per_axis + i;
}

bool CubeGrid::index_range(const Box& b, std::int64_t& i0, std::int64_t& i1, std::int64_t& j0, std::int64_t& j1) const {
  const Box r = root.box();
  if (b.hi.x < r.lo.x || b.lo.x > r.hi.x || b.hi.y < r.lo.y || b.lo.y > r.hi.y) return false;
  auto idx = [&](double v, double lo) {
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor((v - lo) / side)), 0, per_axis - 1);
  };
  i0 = idx(b.lo.x, r.lo.x);
  i1 = idx(b.hi.x, r.lo.x);
  j0 = idx(b.lo.y, r.lo.y);
  j1 = idx(b.hi.y, r.lo.y);
  return true;
}

bool is_dyadic(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) return false;
  int e = 0;
  return std::frexp(x, &e) == 0.5;
}

CubeGrid cube_grid(const Cube& root, double scale, ScaleMode mode, const ScaleParams& params) {
  if (!is_dyadic(scale)) throw ValidationError("cube_grid: scale " + std::to_string(scale) + " is not dyadic");
  const double rd2 = std::pow(params.R, params.d - 2.0);
  double divisions = 0.0;
  if (mode == ScaleMode::Xi) {
    if (scale < 1.0 || scale > rd2 * (1.0 + 1e-12))
      throw ValidationError("cube_grid: Xi must lie in [1, R^(d-2)] (got " + std::to_string(scale) + ")");
    divisions = scale;
  } else {
    divisions = rd2 * scale;
  }
  if (!is_dyadic(divisions) || divisions < 1.0 || divisions > 1048576.0)
    throw ValidationError("cube_grid: subdivision count " + std::to_string(divisions) + " is not an admissible dyadic number");
  CubeGrid g;
  g.root = root;
  g.per_axis = static_cast<std::int64_t>(divisions);
  g.side = root.side / divisions;
  int e = 0;
  std::frexp(divisions, &e);
  g.level = e - 1;
  return g;
}

Cube parent_cube(const Cube& q, const CubeGrid& grid) {
  if (q.side >= grid.root.side) throw ValidationError("parent_cube: root has no parent");
  const double ps = 2.0 * q.side;
  const Vec2 rel = q.lo - grid.root.lo;
  const Vec2 lo = grid.root.lo + Vec2{std::floor(rel.x / ps + 1e-9) * ps, std::floor(rel.y / ps + 1e-9) * ps};
  return {lo, ps};
}

Cube root_cube(double R, double d) {
  const double rd = std::pow(R, d);
  double side = std::exp2(std::ceil(std::log2(2.0 * rd) - 1e-12));
  return {{-0.5 * side, -0.5 * side}, side};
}

}  // namespace rlab
