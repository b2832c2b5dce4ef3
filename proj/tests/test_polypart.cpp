#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "rlab/error.hpp"
#include "rlab/polypart.hpp"

using namespace rlab;

namespace {

// Independent imbalance count: weights strictly on each side of P.
double count_imbalance(const Polynomial2& P, const std::vector<Vec2>& pts) {
  double pos = 0, neg = 0;
  for (Vec2 p : pts) {
    const double v = P(p);
    pos += v > 0 ? 1 : 0;
    neg += v < 0 ? 1 : 0;
  }
  return std::abs(pos - neg) / static_cast<double>(pts.size());
}

std::vector<Vec2> uniform_points(std::size_t n, std::uint64_t seed, Box b = {{0, 0}, {1, 1}}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(b.lo.x, b.hi.x), uy(b.lo.y, b.hi.y);
  std::vector<Vec2> pts(n);
  for (auto& p : pts) p = {ux(rng), uy(rng)};
  return pts;
}

MassDistribution unit_square_density(std::size_t n = 200) {
  const GridSpec g{{{0, 0}, {1, 1}}, n, n};
  return MassDistribution::from_density(g, std::vector<double>(g.size(), 1.0));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("polynomial arithmetic") {
  const Polynomial2 a = Polynomial2::line(1, 2, 3), b = Polynomial2::line(-1, 0, 1);
  const Polynomial2 ab = a * b;
  for (Vec2 p : {Vec2{0.3, -1.2}, Vec2{2, 5}, Vec2{-1, 0}}) CHECK(ab(p) == doctest::Approx(a(p) * b(p)));
  const Polynomial2 c = Polynomial2::circle({1, 2}, 3);
  CHECK(c({4, 2}) == doctest::Approx(0.0));
  Vec2 g;
  c.value_and_gradient({4, 2}, g);
  CHECK(g.x == doctest::Approx(6.0));
  CHECK(g.y == doctest::Approx(0.0));
  CHECK(Polynomial2::index(0, 0) == 0);
  CHECK(Polynomial2::index(1, 0) == 1);
  CHECK(Polynomial2::index(0, 1) == 2);
  CHECK(Polynomial2::num_coeffs(3) == 10);
  CHECK_THROWS_AS(Polynomial2(2, {1.0, 2.0}), ValidationError);
}

TEST_CASE("affine substitution") {
  std::mt19937_64 rng(1);
  const Polynomial2 Q = Polynomial2::random(3, rng);
  const Vec2 c{0.4, -2.0};
  const double s = 3.5;
  const Polynomial2 P = affine_substitute(Q, c, s);
  for (Vec2 x : {Vec2{1, 1}, Vec2{-3, 0.2}, Vec2{5, 7}}) CHECK(P(x) == doctest::Approx(Q((x - c) / s)).epsilon(1e-12));
}

TEST_CASE("minimal bisection degrees") {
  CHECK(min_bisect_degree(1) == 1);
  CHECK(min_bisect_degree(2) == 1);
  CHECK(min_bisect_degree(3) == 2);
  CHECK(min_bisect_degree(5) == 2);
  CHECK(min_bisect_degree(8) == 3);
  CHECK(min_bisect_degree(9) == 3);
  CHECK(min_bisect_degree(16) == 5);
}

TEST_CASE("bisect one uniform mass with a line") {
  const MassDistribution m = unit_square_density();
  const BisectResult r = bisect({m}, 1, 7);
  CHECK(r.imbalance <= 0.02);
  CHECK(count_imbalance(r.poly, m.points) <= 0.02);
  CHECK(r.poly.coeff_norm() == doctest::Approx(1.0));
}

TEST_CASE("bisect two point masses") {
  const MassDistribution m = MassDistribution::uniform_points({{-1, 0}, {1, 0}});
  const BisectResult r = bisect({m}, 1, 3);
  CHECK(r.imbalance == 0.0);
  CHECK(r.poly({-1, 0}) * r.poly({1, 0}) < 0.0);
}

TEST_CASE("bisect four Gaussian clusters with a conic") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 0.3);
  std::vector<MassDistribution> ms;
  std::vector<std::vector<Vec2>> raw;
  for (Vec2 c : {Vec2{1, 1}, Vec2{-1, 1}, Vec2{-1, -1}, Vec2{1, -1}}) {
    std::vector<Vec2> pts(500);
    for (auto& p : pts) p = c + Vec2{g(rng), g(rng)};
    raw.push_back(pts);
    ms.push_back(MassDistribution::uniform_points(pts));
  }
  const BisectResult r = bisect(ms, 2, 5);
  CHECK(r.poly.degree() == 2);
  for (const auto& pts : raw) CHECK(count_imbalance(r.poly, pts) <= 0.02);
}

TEST_CASE("bisect contract failures") {
  // An unreachable tolerance exhausts the restarts and reports the best split found.
  const MassDistribution u = unit_square_density(50);
  BisectOptions o;
  o.tolerance = -1.0;
  o.max_restarts = 4;
  try {
    bisect({u}, 1, 1, o);
    FAIL("expected BisectError");
  } catch (const BisectError& e) {
    CHECK(e.best_imbalance >= 0.0);
    CHECK(e.best_imbalance <= 0.02);
  }
  CHECK_THROWS_AS(bisect({u, u, u}, 1, 1), ValidationError);
  CHECK_THROWS_AS(bisect({MassDistribution::uniform_points({})}, 1, 1), ValidationError);
}

TEST_CASE("partition of the unit square, D=1 and D=2") {
  const MassDistribution m = unit_square_density();
  PartitionOptions o;
  o.grid_n = 256;
  const Partition p1 = partition(m, 1, {{0, 0}, {1, 1}}, 1, o);
  REQUIRE(p1.num_cells() == 2);
  for (double v : p1.masses) CHECK(std::abs(v - 0.5) <= 0.02);
  const Partition p2 = partition(m, 2, {{0, 0}, {1, 1}}, 1, o);
  REQUIRE(p2.num_cells() == 4);
  for (double v : p2.masses) {
    CHECK(v >= 0.125);
    CHECK(v <= 0.5);
    CHECK(std::abs(v - 0.25) <= 0.02);
  }
}

TEST_CASE("partition of 10^4 random points, D=8") {
  const auto pts = uniform_points(10000, 2024);
  const MassDistribution m = MassDistribution::uniform_points(pts);
  const Partition p = partition(m, 8, {{0, 0}, {1, 1}}, 17);
  // Oracle: recount cell membership from the factor signs.
  std::map<std::uint32_t, double> counts;
  for (Vec2 x : pts) {
    std::uint32_t code = 0;
    bool zero = false;
    for (std::size_t k = 0; k < p.factors.size(); ++k) {
      const double v = p.factors[k](x);
      zero |= v == 0.0;
      code |= (v > 0.0 ? 1u : 0u) << k;
    }
    if (!zero) counts[code] += 1.0;
  }
  std::vector<double> nonempty;
  for (const auto& [c, v] : counts) nonempty.push_back(v);
  const double med = median(nonempty);
  for (double v : nonempty) {
    CHECK(v <= 2.0 * med);
    CHECK(v >= 0.5 * med);
  }
  CHECK(p.num_cells() <= 8 * 8 + 8 + 2);
  CHECK(p.num_cells() >= 2);
  int total_degree = 0;
  for (const auto& f : p.factors) total_degree += f.degree();
  CHECK(total_degree <= 8);
  CHECK(p.polynomial.degree() == total_degree);
  // Every point lands in exactly one cell or on the zero set.
  double assigned = p.wall_mass;
  for (double v : p.masses) assigned += v;
  CHECK(assigned == doctest::Approx(10000.0));
}

TEST_CASE("factors are non-singular at every detected crossing") {
  const auto pts = uniform_points(4000, 3);
  PartitionOptions o;
  o.grid_n = 512;
  const Partition p = partition(MassDistribution::uniform_points(pts), 4, {{0, 0}, {1, 1}}, 5, o);
  for (const auto& f : p.factors) {
    const auto v = sample_on_grid(f, p.grid);
    double gmax = 0.0;
    for (std::size_t k = 0; k < p.grid.size(); ++k) gmax = std::max(gmax, norm(f.gradient(p.grid.center(k))));
    for (Vec2 z : zero_crossings(p.grid, v).points) CHECK(norm(f.gradient(z)) >= 1e-6 * gmax);
  }
  CHECK(p.perturbation >= 1e-9);
}

TEST_CASE("partition is deterministic in its seed") {
  const auto pts = uniform_points(3000, 8);
  PartitionOptions o;
  o.grid_n = 256;
  const MassDistribution m = MassDistribution::uniform_points(pts);
  const Partition a = partition(m, 4, {{0, 0}, {1, 1}}, 21, o);
  const Partition b = partition(m, 4, {{0, 0}, {1, 1}}, 21, o);
  CHECK(a.label == b.label);
  CHECK(a.polynomial.coeffs() == b.polynomial.coeffs());
  CHECK(a.masses == b.masses);
}

TEST_CASE("wall of a horizontal line") {
  const Partition p = partition_of(Polynomial2::line(0, 1, 0), {{-1, -1}, {1, 1}}, 200);
  const double area = mask_area(p.grid, wall(p, 0.1));
  const double layer = 2.0 * 2.0 * p.grid.hy();
  CHECK(std::abs(area - 0.4) <= layer);
}

TEST_CASE("wall below one grid step is the sign-change set") {
  const Partition p = partition_of(Polynomial2::circle({0.1, 0.0}, 0.6), {{-1, -1}, {1, 1}}, 128);
  const auto w = wall(p, 0.1 * p.grid.hx());
  std::size_t n = 0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    CHECK(w[k] == p.distance.touches[k]);
    n += w[k];
  }
  CHECK(n > 0);
}

TEST_CASE("wall of the unit circle is an annulus") {
  const Partition p = partition_of(Polynomial2::circle({0, 0}, 1.0), {{-2, -2}, {2, 2}}, 1024);
  const double area = mask_area(p.grid, wall(p, 0.1));
  CHECK(std::abs(area - 0.4 * M_PI) <= 0.03 * 0.4 * M_PI);
}

TEST_CASE("distance map against the exact circle distance") {
  const Partition p = partition_of(Polynomial2::circle({0, 0}, 1.0), {{-2, -2}, {2, 2}}, 256);
  double worst = 0.0;
  for (std::size_t k = 0; k < p.grid.size(); ++k) {
    const double exact = std::abs(norm(p.grid.center(k)) - 1.0);
    worst = std::max(worst, std::abs(p.distance.dist[k] - exact));
  }
  CHECK(worst <= 2.0 * p.grid.hx());
}

TEST_CASE("tube incidence with two crossing lines") {
  Partition p = partition_of(Polynomial2::line(1, 0, 0), {{-4, -4}, {4, 4}}, 256);
  p = partition_of(Polynomial2::line(1, 0, 0) * Polynomial2::line(0, 1, 0), {{-4, -4}, {4, 4}}, 256);
  Tube T;
  T.center = {0.3, -0.2};
  T.dir = normalized({1.0, 0.7});
  T.length = 6.0;
  T.width = 0.5;
  CHECK(tube_cell_incidence(p, T) <= 3);
  CHECK(tube_cell_incidence(p, T) >= 2);
  T.center = {40, 40};
  CHECK(tube_cell_incidence(p, T) == 0);
}

TEST_CASE("random axes meet at most D+1 cells") {
  const auto pts = uniform_points(5000, 99, {{-1, -1}, {1, 1}});
  PartitionOptions o;
  o.grid_n = 256;
  const Partition p = partition(MassDistribution::uniform_points(pts), 6, {{-1, -1}, {1, 1}}, 4, o);
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(-1, 1), a(0, M_PI);
  for (int k = 0; k < 100; ++k) {
    Tube T;
    T.center = {u(rng), u(rng)};
    const double th = a(rng);
    T.dir = {std::cos(th), std::sin(th)};
    T.length = 4.0;
    T.width = 0.1;
    CHECK(tube_cell_incidence(p, T) <= 7);
  }
}

TEST_CASE("components refine sign classes") {
  // x y has four quadrant components but two sign classes.
  const Partition p = partition_of(Polynomial2::line(1, 0, 0.01) * Polynomial2::line(0, 1, 0.013), {{-1, -1}, {1, 1}}, 128);
  CHECK(p.num_cells() == 2);
  CHECK(p.num_components == 4);
}
