#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "rlab/error.hpp"
#include "rlab/polypart.hpp"
#include "rlab/variety.hpp"

using namespace rlab;

namespace {

Tube make_tube(Vec2 c, double angle, double L, double W) {
  Tube t;
  t.center = c;
  t.dir = {std::cos(angle), std::sin(angle)};
  t.length = L;
  t.width = W;
  return t;
}

// Intersection area of two convex polygons by vertex enumeration: every
// pairwise intersection of edge lines plus every vertex, kept when feasible
// for both polygons, then ordered by angle around the centroid.
double halfplane_area(const Polygon& a, const Polygon& b) {
  struct Line {
    Vec2 p, d;
  };
  std::vector<Line> lines;
  for (const Polygon* poly : {&a, &b})
    for (std::size_t k = 0; k < poly->size(); ++k) lines.push_back({(*poly)[k], (*poly)[(k + 1) % poly->size()] - (*poly)[k]});
  auto feasible = [&](Vec2 x) {
    for (const auto& l : lines)
      if (cross(l.d, x - l.p) < -1e-9 * norm(l.d)) return false;
    return true;
  };
  std::vector<Vec2> v;
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const double den = cross(lines[i].d, lines[j].d);
      if (std::abs(den) < 1e-14) continue;
      const double t = cross(lines[j].p - lines[i].p, lines[j].d) / den;
      const Vec2 x = lines[i].p + lines[i].d * t;
      if (feasible(x)) v.push_back(x);
    }
  if (v.size() < 3) return 0.0;
  Vec2 c{0, 0};
  for (Vec2 x : v) c += x;
  c = c / static_cast<double>(v.size());
  std::sort(v.begin(), v.end(), [&](Vec2 p, Vec2 q) { return std::atan2(p.y - c.y, p.x - c.x) < std::atan2(q.y - c.y, q.x - c.x); });
  double s = 0;
  for (std::size_t k = 0; k < v.size(); ++k) s += cross(v[k], v[(k + 1) % v.size()]);
  return 0.5 * std::abs(s);
}

// Raster area of a union of tubes at pixel size h.
double union_area(const std::vector<Tube>& tubes, double h) {
  Box bb = bounding_box(tubes[0].polygon());
  for (const auto& t : tubes) {
    const Box b = bounding_box(t.polygon());
    bb.lo = {std::min(bb.lo.x, b.lo.x), std::min(bb.lo.y, b.lo.y)};
    bb.hi = {std::max(bb.hi.x, b.hi.x), std::max(bb.hi.y, b.hi.y)};
  }
  const auto nx = static_cast<std::size_t>(std::ceil(bb.width() / h)), ny = static_cast<std::size_t>(std::ceil(bb.height() / h));
  std::vector<std::uint8_t> px(nx * ny, 0);
  for (const auto& t : tubes) {
    const Box b = bounding_box(t.polygon());
    const auto i0 = static_cast<std::size_t>((b.lo.x - bb.lo.x) / h), i1 = std::min(nx - 1, static_cast<std::size_t>((b.hi.x - bb.lo.x) / h));
    const auto j0 = static_cast<std::size_t>((b.lo.y - bb.lo.y) / h), j1 = std::min(ny - 1, static_cast<std::size_t>((b.hi.y - bb.lo.y) / h));
    for (std::size_t j = j0; j <= j1; ++j)
      for (std::size_t i = i0; i <= i1; ++i)
        if (t.contains(bb.lo + Vec2{(i + 0.5) * h, (j + 0.5) * h})) px[j * nx + i] = 1;
  }
  return static_cast<double>(std::count(px.begin(), px.end(), 1)) * h * h;
}

Polynomial2 random_poly_meeting(int D, std::mt19937_64& rng, const Box& b) {
  for (;;) {
    Polynomial2 P = Polynomial2::random(D, rng);
    if (sample_variety(P, b, 64).size() > 4) return P;
  }
}

const ClassParams kDesk{4.0, 3.0, 0.1};

}  // namespace

TEST_CASE("sample_variety on simple curves") {
  const Box sq{{-1, -1}, {1, 1}};
  const auto line = sample_variety(Polynomial2::line(0, 1, 0), sq, 101);
  REQUIRE(!line.empty());
  for (const auto& p : line.points()) {
    CHECK(std::abs(p.z.y) <= 1e-12);
    CHECK(std::abs(std::abs(p.tangent.x) - 1.0) <= 1e-12);
  }
  Polynomial2 empty(2);
  empty.coeff(0, 0) = 1;
  empty.coeff(2, 0) = 1;
  empty.coeff(0, 2) = 1;
  CHECK(sample_variety(empty, sq, 256).empty());

  const auto circ = sample_variety(Polynomial2::circle({0, 0}, 1), {{-1.5, -1.5}, {1.5, 1.5}}, 512);
  CHECK(circ.size() >= 1000);
  double worst = 0;
  for (const auto& p : circ.points()) worst = std::max(worst, std::abs(std::hypot(p.z.x, p.z.y) - 1.0));
  CHECK(worst <= 1e-9);
}

TEST_CASE("sampled tangents are unit and orthogonal to the gradient") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    const Polynomial2 P = Polynomial2::random(4, rng);
    const auto s = sample_variety(P, {{-1, -1}, {1, 1}}, 200);
    for (const auto& p : s.points()) {
      const Vec2 g = P.gradient(p.z);
      CHECK(std::abs(dot(p.tangent, g)) <= 1e-10 * norm(g));
      CHECK(norm(p.tangent) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(P(p.z)) <= 1e-9 * norm(g));
    }
  }
}

TEST_CASE("spaced sampling covers the curve at the requested spacing") {
  const double spacing = 0.05;
  const auto s = sample_variety_spaced(Polynomial2::circle({0.3, -0.2}, 7.0), {{-10, -10}, {10, 10}}, spacing);
  std::vector<double> th;
  for (const auto& p : s.points()) {
    CHECK(std::abs(norm(p.z - Vec2{0.3, -0.2}) - 7.0) <= 1e-9);
    th.push_back(std::atan2(p.z.y + 0.2, p.z.x - 0.3));
  }
  std::sort(th.begin(), th.end());
  double gap = th.front() + 2 * M_PI - th.back();
  for (std::size_t k = 1; k < th.size(); ++k) gap = std::max(gap, th[k] - th[k - 1]);
  CHECK(gap * 7.0 <= 2.0 * spacing);
}

TEST_CASE("box queries return exactly the points inside") {
  std::mt19937_64 rng(9);
  const Polynomial2 P = Polynomial2::random(5, rng);
  const auto s = sample_variety(P, {{-1, -1}, {1, 1}}, 300);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int k = 0; k < 50; ++k) {
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    const Box q{{std::min(a, b), std::min(c, d)}, {std::max(a, b), std::max(c, d)}};
    std::size_t brute = 0, fast = 0;
    for (const auto& p : s.points()) brute += q.contains(p.z) ? 1 : 0;
    s.for_each_in(q, [&](const VarietyPoint&) { ++fast; return true; });
    CHECK(fast == brute);
  }
}

TEST_CASE("angle to variety") {
  const VarietyPoint horiz{{0, 0}, {1, 0}, 1};
  CHECK(angle_to_variety(make_tube({0, 0}, 0, 1, 1), horiz) == doctest::Approx(0.0));
  CHECK(angle_to_variety(make_tube({0, 0}, M_PI / 2, 1, 1), horiz) == doctest::Approx(M_PI / 2));
  const auto diag = sample_variety(Polynomial2::line(-1, 1, 0), {{-1, -1}, {1, 1}}, 33);
  REQUIRE(!diag.empty());
  for (const auto& p : diag.points()) CHECK(angle_to_variety(make_tube({0, 0}, 0, 1, 1), p) == doctest::Approx(M_PI / 4));
}

TEST_CASE("ladders and thresholds") {
  CHECK(xi_ladder(kDesk) == std::vector<double>{1, 2, 4});
  CHECK(delta_ladder(kDesk).empty());
  const ClassParams big{64, 3, 0.1};
  CHECK(delta_ladder(big) == std::vector<double>{1, 2});
  CHECK(xi_threshold(2, kDesk) == doctest::Approx(2 * std::pow(4.0, -1.9)));
  CHECK(delta_threshold(2, big) == doctest::Approx(2.0 / 64));
}

TEST_CASE("classify membership rules") {
  const Cube root = root_cube(4, 3);
  const auto ctx = VarietyContext::build(Polynomial2::line(0, 1, 0), root.box(), kDesk);
  const Tube flat = make_tube({0, 0}, 0, 64, 4);
  for (double xi : xi_ladder(kDesk)) {
    const CubeGrid g = cube_grid(root, xi, ScaleMode::Xi, kDesk.scale());
    const auto cls = classify(ctx, {flat}, g, xi, ScaleMode::Xi);
    // T* is 73.5 long around the origin; every cube it overlaps touches the x axis.
    std::size_t expected = 0;
    for (const auto& q : g.cubes())
      if (convex_overlap(flat.polygon(kDesk.tstar()), box_polygon(q.box())) && q.box().lo.y <= 0 && q.box().hi.y >= 0) ++expected;
    CHECK(cls.size() == expected);
    for (const auto& c : cls) CHECK(c.members == std::vector<std::size_t>{0});
  }
  const Cube q{{-16, -16}, 32};
  CHECK(ctx.member(flat, q, 1e-12));
  CHECK_FALSE(ctx.member(make_tube({0, 0}, 0.5, 64, 4), q, 0.25));
  const Tube far = make_tube({0, 40}, 0, 64, 4);
  CHECK_FALSE(ctx.meets_wall(far));
  CHECK_FALSE(ctx.member(far, {{-64, 32}, 32}, M_PI));

  const CubeGrid g1 = cube_grid(root, 1, ScaleMode::Xi, kDesk.scale());
  CHECK_THROWS_AS(classify(ctx, {flat}, g1, 8, ScaleMode::Xi), ValidationError);
  CHECK_THROWS_AS(classify(ctx, {flat}, g1, 1, ScaleMode::Delta), ValidationError);
}

TEST_CASE("tang/tran split: nothing meets the wall") {
  const Cube root = root_cube(4, 3);
  const auto ctx = VarietyContext::build(Polynomial2::line(0, 1, 0), root.box(), kDesk);
  std::vector<Tube> tubes{make_tube({0, 40}, 0, 64, 4), make_tube({-20, -45}, 0.3, 64, 4)};
  const auto s = tang_tran_split(ctx, tubes, root);
  CHECK(s.cell == std::vector<std::size_t>{0, 1});
  CHECK(s.tang.empty());
  CHECK(s.tran.empty());
}

TEST_CASE("tang/tran split: horizontal tubes along a horizontal line") {
  const Cube root = root_cube(4, 3);
  const auto ctx = VarietyContext::build(Polynomial2::line(0, 1, 0), root.box(), kDesk);
  std::vector<Tube> tubes;
  for (double y : {-1.0, 0.0, 1.5})
    for (double x : {-20.0, 0.0, 20.0}) tubes.push_back(make_tube({x, y}, 0, 64, 4));
  const auto s = tang_tran_split(ctx, tubes, root);
  CHECK(s.complement_at_xi);
  CHECK(s.cell.empty());
  CHECK(s.tran.empty());
  REQUIRE(s.tang.size() == 1);
  CHECK(s.tang[0].scale == 1.0);
  CHECK(s.tang[0].members.size() == tubes.size());
}

namespace {

void check_mixed_family(const ClassParams& p) {
  const Cube root = root_cube(p.R, p.d);
  const auto ctx = VarietyContext::build(Polynomial2::line(0, 1, 0), root.box(), p);
  const double L = std::pow(p.R, p.d), W = p.R;
  std::vector<Tube> tubes;
  for (int k = 0; k < 4; ++k) tubes.push_back(make_tube({(k - 1.5) * 0.1 * L, (k - 1.5) * 0.2 * W}, 0, L, W));
  for (int k = 0; k < 4; ++k) tubes.push_back(make_tube({(k - 1.5) * 0.1 * L, 0}, M_PI / 4, L, W));
  const auto s = tang_tran_split(ctx, tubes, root);
  CHECK(s.cell.empty());
  std::set<std::size_t> tang, tran;
  for (const auto& c : s.tang) tang.insert(c.members.begin(), c.members.end());
  for (const auto& c : s.tran) {
    tran.insert(c.members.begin(), c.members.end());
    // 45 degrees exceeds every admissible transverse threshold, so these are complement classes.
    CHECK(c.complement);
  }
  CHECK(tang == std::set<std::size_t>{0, 1, 2, 3});
  CHECK(tran == std::set<std::size_t>{4, 5, 6, 7});
}

}  // namespace

TEST_CASE("tang/tran split: parallel and 45 degree tubes at desk scale") { check_mixed_family(kDesk); }

TEST_CASE("tang/tran split: parallel and 45 degree tubes with a Delta ladder") {
  const ClassParams p{64, 3, 0.1};
  REQUIRE(!delta_ladder(p).empty());
  check_mixed_family(p);
}

TEST_CASE("every wall-meeting tube lands in a class") {
  const ClassParams p{8, 3, 0.1};
  const Cube root = root_cube(p.R, p.d);
  std::mt19937_64 rng(77);
  for (int inst = 0; inst < 5; ++inst) {
    const Polynomial2 P = affine_substitute(random_poly_meeting(3, rng, {{-1, -1}, {1, 1}}), {0, 0}, 512);
    const auto ctx = VarietyContext::build(P, root.box(), p);
    std::uniform_real_distribution<double> uc(-400, 400), ua(0, M_PI);
    std::vector<Tube> tubes;
    for (int k = 0; k < 40; ++k) tubes.push_back(make_tube({uc(rng), uc(rng)}, ua(rng), 512, 8));
    const auto s = tang_tran_split(ctx, tubes, root);
    std::vector<int> hits(tubes.size(), 0);
    for (const auto* list : {&s.tang, &s.tran})
      for (const auto& c : *list)
        for (auto m : c.members) ++hits[m];
    std::set<std::size_t> cell(s.cell.begin(), s.cell.end());
    for (std::size_t t = 0; t < tubes.size(); ++t) {
      CHECK(ctx.meets_wall(tubes[t]) == !cell.count(t));
      if (!cell.count(t)) CHECK(hits[t] >= 1);
      else CHECK(hits[t] == 0);
    }
    // Classes at one scale are disjoint across kinds.
    for (const auto& a : s.tang)
      for (const auto& b : s.tran)
        if (a.scale == b.scale && a.mode == b.mode && a.cube == b.cube)
          for (auto m : a.members) CHECK_FALSE(std::binary_search(b.members.begin(), b.members.end(), m));
  }
}

TEST_CASE("classification monotonicity on random instances") {
  const ClassParams p{8, 3, 0.1};
  const Cube root = root_cube(p.R, p.d);
  std::mt19937_64 rng(2024);
  int hypotheses = 0, violations = 0;
  for (int inst = 0; inst < 10; ++inst) {
    const Polynomial2 P = affine_substitute(random_poly_meeting(4, rng, {{-1, -1}, {1, 1}}), {0, 0}, 512);
    const auto ctx = VarietyContext::build(P, root.box(), p);
    const auto& pts = ctx.sample().points();
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    std::uniform_real_distribution<double> ua(0, M_PI), off(-20, 20);
    std::uniform_int_distribution<int> lev(1, 3);
    for (int k = 0; k < 30; ++k) {
      // Tubes through sampled points so the wall hypothesis is often met.
      const Vec2 z = pts[pick(rng)].z;
      const Tube T = make_tube(z + Vec2{off(rng), off(rng)}, ua(rng), 512, 8);
      const double xi = std::exp2(lev(rng));
      const CubeGrid g = cube_grid(root, xi, ScaleMode::Xi, p.scale());
      const Cube q = g.cube(static_cast<std::size_t>(g.index_of(z)));
      if (!(ctx.meets_wall(T, q.box()) && !ctx.member(T, q, xi_threshold(xi, p)))) continue;
      ++hypotheses;
      if (ctx.member(T, parent_cube(q, g), xi_threshold(xi / 2, p))) ++violations;
    }
  }
  CHECK(hypotheses >= 30);
  CHECK(violations == 0);
}

TEST_CASE("neighbourhood volume of a line and a circle") {
  const auto line = neighborhood_volume(Polynomial2::line(1, 0, 0), 0.1, {{-1, -1}, {1, 1}}, 200000, 1);
  CHECK(std::abs(line.estimate - 0.4) <= 3 * line.std_error);
  const auto circ = neighborhood_volume(Polynomial2::circle({0, 0}, 1), 0.1, {{-2, -2}, {2, 2}}, 200000, 2);
  CHECK(std::abs(circ.estimate - 0.4 * M_PI) <= 3 * circ.std_error);
  CHECK(neighborhood_volume(Polynomial2::circle({0, 0}, 1), 1e-9, {{-2, -2}, {2, 2}}, 100000, 3).estimate == 0.0);
  CHECK_THROWS_AS(neighborhood_volume(Polynomial2::line(1, 0, 0), 0.0, {{-1, -1}, {1, 1}}, 10, 1), ValidationError);
}

TEST_CASE("neighbourhood volume does not depend on the execution mode") {
  std::mt19937_64 rng(3);
  const Polynomial2 P = Polynomial2::random(4, rng);
  const auto a = neighborhood_volume(P, 0.05, {{-1, -1}, {1, 1}}, 50000, 9, Exec::serial);
  const auto b = neighborhood_volume(P, 0.05, {{-1, -1}, {1, 1}}, 50000, 9, Exec::parallel);
  CHECK(a.estimate == b.estimate);
}

TEST_CASE("distance to the variety matches the exact circle distance") {
  const Polynomial2 C = Polynomial2::circle({0, 0}, 1);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 200; ++k) {
    const Vec2 q{u(rng), u(rng)};
    if (norm(q) < 0.05) continue;
    CHECK(distance_to_variety(C, q, nullptr) == doctest::Approx(std::abs(norm(q) - 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("Wongkew scaling on random polynomials") {
  std::mt19937_64 rng(11);
  const Box dom{{-1, -1}, {1, 1}};
  const double L = 1.0, rho = 0.05;
  for (int k = 0; k < 8; ++k) {
    const int D = 1 + k % 6;
    const Polynomial2 P = random_poly_meeting(D, rng, dom);
    const auto v1 = neighborhood_volume(P, rho, dom, 100000, 100 + k);
    const auto v2 = neighborhood_volume(P, rho / 2, dom, 100000, 200 + k);
    CHECK(v1.estimate <= 16.0 * D * rho * L);
    CHECK(v2.estimate / v1.estimate == doctest::Approx(0.5).epsilon(0.3));
  }
}

TEST_CASE("transverse segments") {
  CHECK(transverse_segments(Polynomial2::line(0, 1, 0), make_tube({0, 0}, 0, 2, 0.2), 0.1, 0.1) == 0);
  const Tube strip = make_tube({0, 0}, 0, 2.4, 0.1);
  CHECK(transverse_segments(Polynomial2::circle({0, 0}, 1), strip, 0.2, 0.05) == 2);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uc(-0.5, 0.5), ua(0, M_PI);
  for (int k = 0; k < 20; ++k) {
    const Polynomial2 P = Polynomial2::random(3, rng);
    const Tube T = make_tube({uc(rng), uc(rng)}, ua(rng), 2.0, 0.01);
    CHECK(transverse_segments(P, T, 0.05, 0.005) <= 18);
  }
  CHECK_THROWS_AS(transverse_segments(Polynomial2::line(0, 1, 0), strip, 0.0, 0.05), ValidationError);
}

TEST_CASE("direction count near a line") {
  const double L = 100, W = 1;
  const std::size_t J = 1000;
  const auto fam = direction_family({0, 0}, L, W, J);
  const int c = direction_count(fam, Polynomial2::line(0, 1, 0), {0, 0}, L, W, L, W, J);
  // A centred tube at angle t lies in |y| <= W iff (L/2)|sin t| + (W/2)cos t <= W.
  int oracle = 0;
  for (const auto& t : fam) oracle += (L / 2) * std::abs(t.dir.y) + (W / 2) * std::abs(t.dir.x) <= W ? 1 : 0;
  CHECK(c == oracle);
  CHECK(c <= 8.0 * std::log(static_cast<double>(J)));
  CHECK(direction_count(fam, Polynomial2::line(0, 1, -1000), {0, 0}, L, W, L, W, J) == 0);

  std::vector<Tube> par;
  for (double y : {-0.3, 0.0, 0.4}) par.push_back(make_tube({0, y}, 0, L, W));
  CHECK(direction_count(par, Polynomial2::line(0, 1, 0), {0, 0}, L, W, L, W, 1) == 1);
  CHECK_THROWS_AS(direction_count(fam, Polynomial2::line(0, 1, 0), {0, 0}, L, W, L, W, 1001), ValidationError);
}

TEST_CASE("overlap sums") {
  const Tube T = make_tube({0, 0}, 0, 10, 1);
  CHECK(overlap_sum(T, {T}) == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(overlap_sum(T, {T, make_tube({0, 0}, M_PI / 2, 10, 1)}) == doctest::Approx(11.0).epsilon(1e-12));
  std::vector<Tube> fam;
  double oracle = 0, rough = 0;
  for (int j = 1; j <= 10; ++j) {
    fam.push_back(make_tube({0, 0}, j / 10.0, 10, 1));
    oracle += halfplane_area(fam.back().polygon(), T.polygon());
    rough += std::min(10.0, 1.0 / std::sin(j / 10.0));
  }
  const double s = overlap_sum(T, fam);
  CHECK(std::abs(s - oracle) <= 1e-9 * oracle);
  CHECK(rough == doctest::Approx(30.3).epsilon(0.01));
  CHECK(s <= rough);
  CHECK(s <= 8 * std::log(10.0) * 10.0);
  CHECK_THROWS_AS(overlap_sum(T, {T, T}), ValidationError);
  CHECK_THROWS_AS(overlap_sum(make_tube({0, 0}, 0, 1, 1), direction_family({0, 0}, 1, 1, 11)), ValidationError);
}

TEST_CASE("union bound on direction families") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> uL(5, 30), uc(-1, 1);
  for (int k = 0; k < 12; ++k) {
    const double L = uL(rng), W = 1;
    const std::size_t J = std::uniform_int_distribution<std::size_t>(2, static_cast<std::size_t>(10 * L / W))(rng);
    auto fam = direction_family({0, 0}, L, W, J);
    for (auto& t : fam) t.center = {uc(rng) * L / 4, uc(rng) * L / 4};
    const double total = static_cast<double>(J) * L * W;
    CHECK(total <= 8.0 * std::log(static_cast<double>(J)) * union_area(fam, W / 8));
  }
}
