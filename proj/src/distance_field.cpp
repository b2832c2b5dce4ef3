#include "rlab/distance_field.hpp"

#include <limits>

#include "rlab/error.hpp"

namespace rlab {

void GridSpec::validate() const {
  if (nx < 2 || ny < 2) throw ValidationError("grid needs at least 2x2 pixels");
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0)) throw ValidationError("grid domain must have positive area");
}

bool GridSpec::locate(Vec2 p, std::size_t& i, std::size_t& j) const {
  if (!domain.contains(p)) return false;
  const auto fi = static_cast<std::size_t>(std::floor((p.x - domain.lo.x) / hx()));
  const auto fj = static_cast<std::size_t>(std::floor((p.y - domain.lo.y) / hy()));
  i = std::min(fi, nx - 1);
  j = std::min(fj, ny - 1);
  return true;
}

std::vector<double> sample_on_grid(const Polynomial2& P, const GridSpec& grid, Exec exec) {
  grid.validate();
  std::vector<double> v(grid.size());
  for_each_index(grid.size(), [&](std::size_t k) { v[k] = P(grid.center(k)); }, exec);
  return v;
}

CrossingSet zero_crossings(const GridSpec& grid, const std::vector<double>& values) {
  CrossingSet cs;
  auto edge = [&](std::size_t a, std::size_t b) {
    const double va = values[a], vb = values[b];
    if (va == 0.0 || vb == 0.0 || (va > 0.0) == (vb > 0.0)) return;
    const double t = va / (va - vb);
    const Vec2 pa = grid.center(a), pb = grid.center(b);
    cs.points.push_back(pa + (pb - pa) * t);
    cs.edges.emplace_back(a, b);
  };
  for (std::size_t j = 0; j < grid.ny; ++j)
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const std::size_t k = grid.flat(i, j);
      if (i + 1 < grid.nx) edge(k, k + 1);
      if (j + 1 < grid.ny) edge(k, k + grid.nx);
    }
  return cs;
}

double DistanceMap::at(Vec2 p) const {
  std::size_t i = 0, j = 0;
  if (!grid.locate(p, i, j)) return std::numeric_limits<double>::infinity();
  return dist[grid.flat(i, j)];
}

DistanceMap distance_to_crossings(const GridSpec& grid, const std::vector<const std::vector<double>*>& fields) {
  grid.validate();
  const std::size_t n = grid.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<Vec2> seed(n);
  std::vector<std::uint8_t> has(n, 0);
  DistanceMap dm;
  dm.grid = grid;
  dm.dist.assign(n, inf);
  dm.touches.assign(n, 0);

  auto offer = [&](std::size_t k, Vec2 s) {
    const double d = norm(grid.center(k) - s);
    if (d < dm.dist[k]) {
      dm.dist[k] = d;
      seed[k] = s;
      has[k] = 1;
    }
  };
  for (const auto* values : fields) {
    if (values->size() != n) throw ValidationError("distance_to_crossings: field size does not match grid");
    for (std::size_t k = 0; k < n; ++k)
      if ((*values)[k] == 0.0) {
        offer(k, grid.center(k));
        dm.touches[k] = 1;
      }
    const CrossingSet cs = zero_crossings(grid, *values);
    for (std::size_t c = 0; c < cs.points.size(); ++c) {
      const auto [a, b] = cs.edges[c];
      offer(a, cs.points[c]);
      offer(b, cs.points[c]);
      dm.touches[a] = dm.touches[b] = 1;
    }
  }

  const auto nx = static_cast<std::ptrdiff_t>(grid.nx), ny = static_cast<std::ptrdiff_t>(grid.ny);
  auto pull = [&](std::ptrdiff_t i, std::ptrdiff_t j, std::ptrdiff_t di, std::ptrdiff_t dj) {
    const std::ptrdiff_t a = i + di, b = j + dj;
    if (a < 0 || b < 0 || a >= nx || b >= ny) return;
    const std::size_t from = grid.flat(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    if (!has[from]) return;
    offer(grid.flat(static_cast<std::size_t>(i), static_cast<std::size_t>(j)), seed[from]);
  };
  for (std::ptrdiff_t j = 0; j < ny; ++j) {
    for (std::ptrdiff_t i = 0; i < nx; ++i) {
      pull(i, j, -1, 0);
      pull(i, j, -1, -1);
      pull(i, j, 0, -1);
      pull(i, j, 1, -1);
    }
    for (std::ptrdiff_t i = nx - 1; i >= 0; --i) pull(i, j, 1, 0);
  }
  for (std::ptrdiff_t j = ny - 1; j >= 0; --j) {
    for (std::ptrdiff_t i = nx - 1; i >= 0; --i) {
      pull(i, j, 1, 0);
      pull(i, j, 1, 1);
      pull(i, j, 0, 1);
      pull(i, j, -1, 1);
    }
    for (std::ptrdiff_t i = 0; i < nx; ++i) pull(i, j, -1, 0);
  }
  return dm;
}

}  // namespace rlab
