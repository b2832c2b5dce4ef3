#include "rlab/batteries.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "rlab/error.hpp"
#include "rlab/polypart.hpp"

namespace rlab {

double BatteryResult::max_constant(const std::string& lemma) const {
  double m = 0.0;
  for (const auto& row : table.rows)
    if (row[0] == lemma) m = std::max(m, std::stod(row[5]));
  return m;
}

namespace {

Table battery_table() { return Table{{"lemma", "instance", "D", "quantity", "bound", "constant", "pinned", "within"}, {}}; }

void add_row(BatteryResult& res, const std::string& lemma, int instance, int D, double quantity, double bound, double constant, double pinned,
             bool within) {
  res.table.add({lemma, std::to_string(instance), std::to_string(D), format_double(quantity), format_double(bound), format_double(constant),
                 format_double(pinned), within ? "1" : "0"});
  if (!within) ++res.violations;
}

std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t tag, int k) {
  std::seed_seq ss{seed, tag, static_cast<std::uint64_t>(k)};
  return std::mt19937_64(ss);
}

Tube make_tube(Vec2 c, Vec2 dir, double L, double W) {
  Tube t;
  t.center = c;
  t.dir = normalized(dir);
  t.length = L;
  t.width = W;
  return t;
}

double angle_key(Vec2 dir) {
  double t = std::atan2(dir.y, dir.x);
  if (t < 0.0) t += M_PI;
  return std::round(t * 1e9) / 1e9;
}

}  // namespace

Polynomial2 random_polynomial_meeting(int degree, std::mt19937_64& rng, const Box& box) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Polynomial2 P = Polynomial2::random(degree, rng);
    if (sample_variety(P, box, 64).size() > 4) return P;
  }
  throw ValidationError("random_polynomial_meeting: no curve met the box in 1000 draws");
}

double union_area(const std::vector<Tube>& tubes, double h) {
  if (tubes.empty()) return 0.0;
  if (!(h > 0.0)) throw ValidationError("union_area: pixel size must be positive");
  Box bb = bounding_box(tubes[0].polygon());
  for (const auto& t : tubes) {
    const Box b = bounding_box(t.polygon());
    bb.lo = {std::min(bb.lo.x, b.lo.x), std::min(bb.lo.y, b.lo.y)};
    bb.hi = {std::max(bb.hi.x, b.hi.x), std::max(bb.hi.y, b.hi.y)};
  }
  const auto nx = static_cast<std::size_t>(std::ceil(bb.width() / h)), ny = static_cast<std::size_t>(std::ceil(bb.height() / h));
  if (static_cast<double>(nx) * static_cast<double>(ny) > 4e8) throw BudgetError("union_area: raster larger than 4e8 pixels");
  std::vector<std::uint8_t> px(nx * ny, 0);
  for (const auto& t : tubes) {
    const Box b = bounding_box(t.polygon());
    const auto i0 = static_cast<std::size_t>(std::max(0.0, std::floor((b.lo.x - bb.lo.x) / h)));
    const auto j0 = static_cast<std::size_t>(std::max(0.0, std::floor((b.lo.y - bb.lo.y) / h)));
    const auto i1 = std::min(nx - 1, static_cast<std::size_t>((b.hi.x - bb.lo.x) / h));
    const auto j1 = std::min(ny - 1, static_cast<std::size_t>((b.hi.y - bb.lo.y) / h));
    for (std::size_t j = j0; j <= j1; ++j)
      for (std::size_t i = i0; i <= i1; ++i)
        if (t.contains(bb.lo + Vec2{(static_cast<double>(i) + 0.5) * h, (static_cast<double>(j) + 0.5) * h})) px[j * nx + i] = 1;
  }
  return static_cast<double>(std::count(px.begin(), px.end(), 1)) * h * h;
}

BatteryResult wongkew_battery(std::uint64_t seed, int instances, std::size_t samples, double rho) {
  BatteryResult res{"wongkew", battery_table(), 0};
  const Box dom{{-1, -1}, {1, 1}};
  const double L = 1.0;
  for (int k = 0; k < instances; ++k) {
    auto rng = instance_rng(seed, 0x301, k);
    const int D = 1 + k % 6;
    const Polynomial2 P = random_polynomial_meeting(D, rng, dom);
    const auto v = neighborhood_volume(P, rho, dom, samples, rng());
    const auto vh = neighborhood_volume(P, 0.5 * rho, dom, samples, rng());
    const double c = v.estimate / (D * rho * L);
    add_row(res, "wongkew", k, D, v.estimate, 16.0 * D * rho * L, c, 16.0, c <= 16.0);
    const double ratio = v.estimate > 0.0 ? vh.estimate / v.estimate : 0.0;
    add_row(res, "wongkew-halving", k, D, ratio, 0.15, std::abs(ratio - 0.5), 0.15, std::abs(ratio - 0.5) <= 0.15);
  }
  return res;
}

BatteryResult segment_battery(std::uint64_t seed, int instances) {
  BatteryResult res{"segments", battery_table(), 0};
  const int D = 3;
  const double a = 0.05, rho = 0.005;
  for (int k = 0; k < instances; ++k) {
    auto rng = instance_rng(seed, 0x302, k);
    const Polynomial2 P = Polynomial2::random(D, rng);
    std::uniform_real_distribution<double> uc(-0.5, 0.5), ua(0.0, M_PI);
    const double th = ua(rng);
    const Tube T = make_tube({uc(rng), uc(rng)}, {std::cos(th), std::sin(th)}, 2.0, 2.0 * rho);
    const int n = transverse_segments(P, T, a, rho);
    add_row(res, "segments", k, D, n, 2.0 * D * D, static_cast<double>(n) / (D * D), 2.0, n <= 2 * D * D);
  }
  return res;
}

BatteryResult incidence_battery(std::uint64_t seed, int families) {
  BatteryResult res{"incidence", battery_table(), 0};
  {
    // Fixed family: L = 10, W = 1, angles j/10 for j = 1..10.
    const Tube T = make_tube({0, 0}, {1, 0}, 10, 1);
    std::vector<Tube> fam;
    for (int j = 1; j <= 10; ++j) fam.push_back(make_tube({0, 0}, {std::cos(j / 10.0), std::sin(j / 10.0)}, 10, 1));
    const double s = overlap_sum(T, fam), bound = 8.0 * std::log(10.0) * 10.0;
    add_row(res, "overlap", -1, 1, s, bound, s / (std::log(10.0) * 10.0), 8.0, s <= bound);
  }
  for (int k = 0; k < families; ++k) {
    auto rng = instance_rng(seed, 0x303, k);
    std::uniform_real_distribution<double> uL(5.0, 40.0), uc(-1.0, 1.0);
    const double L = uL(rng), W = 1.0;
    const auto J = std::uniform_int_distribution<std::size_t>(2, static_cast<std::size_t>(10.0 * L / W))(rng);
    auto fam = direction_family({0, 0}, L, W, J);
    const double spread = std::uniform_real_distribution<double>(0.0, 0.5)(rng) * L;
    for (auto& t : fam) t.center = {uc(rng) * spread, uc(rng) * spread};
    const double logJ = std::log(static_cast<double>(J));
    const Tube& T = fam[std::uniform_int_distribution<std::size_t>(0, J - 1)(rng)];
    const double s = overlap_sum(T, fam), tarea = L * W;
    add_row(res, "overlap", k, 1, s, 8.0 * logJ * tarea, s / (logJ * tarea), 8.0, s <= 8.0 * logJ * tarea);
    const double total = static_cast<double>(J) * L * W, uni = union_area(fam, W / 8.0);
    add_row(res, "union", k, 1, total, 8.0 * logJ * uni, total / (logJ * uni), 8.0, total <= 8.0 * logJ * uni);
  }
  return res;
}

BatteryResult direction_battery(std::uint64_t seed, int instances, int transverse_instances) {
  BatteryResult res{"directions", battery_table(), 0};
  // Tubes near a random curve in B(L); neighbourhood width K2 W with K1 = 1, K2 = 2.
  const double L = 100.0, W = 1.0, K1 = 1.0, K2 = 2.0;
  const std::size_t Js[] = {64, 200, 500, 1000};
  for (int k = 0; k < instances; ++k) {
    auto rng = instance_rng(seed, 0x304, k);
    const int D = 1 + k % 3;
    const Polynomial2 P = affine_substitute(random_polynomial_meeting(D, rng, {{-0.5, -0.5}, {0.5, 0.5}}), {0, 0}, L);
    const auto s = sample_variety(P, {{-0.5 * L, -0.5 * L}, {0.5 * L, 0.5 * L}}, 512);
    if (s.empty()) continue;
    const std::size_t J = Js[static_cast<std::size_t>(k) % 4];
    std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
    std::vector<Tube> tubes;
    for (const auto& base : direction_family({0, 0}, L, W, J))
      for (int m = 0; m < 3; ++m) {
        Tube t = base;
        t.center = s.points()[pick(rng)].z;
        tubes.push_back(t);
      }
    const int n = direction_count(tubes, P, {0, 0}, K1 * L, K2 * W, L, W, J);
    const double unit = D * K1 * K2 * std::log(static_cast<double>(J));
    add_row(res, "directions", k, D, n, 8.0 * unit, n / unit, 8.0, n <= 8.0 * unit);
  }

  const ClassParams p{64.0, 3.0, 0.1};
  const Cube root = root_cube(p.R, p.d);
  const double Rd = std::pow(p.R, p.d);
  const auto tiles = build_frequency_tiles({p.d, static_cast<int>(p.R)});
  for (int k = 0; k < transverse_instances; ++k) {
    auto rng = instance_rng(seed, 0x305, k);
    const int D = 1 + k % 3;
    const Polynomial2 P = affine_substitute(random_polynomial_meeting(D, rng, {{-0.7, -0.7}, {0.7, 0.7}}), {0, 0}, Rd);
    const auto ctx = VarietyContext::build(P, root.box(), p);
    const auto& pts = ctx.sample().points();
    if (pts.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    std::vector<Tube> tubes;
    for (const auto& w : tiles)
      for (int m = 0; m < 4; ++m) tubes.push_back(make_tube(pts[pick(rng)].z, w.normal, Rd, p.R));
    const auto split = tang_tran_split(ctx, tubes, root);
    double worst_dir = 0.0;
    std::map<std::pair<std::size_t, double>, int> cubes;
    for (const auto& c : split.tran) {
      std::set<double> dirs;
      for (auto m : c.members) {
        dirs.insert(angle_key(tubes[m].dir));
        ++cubes[{m, c.scale}];
      }
      worst_dir = std::max(worst_dir, static_cast<double>(dirs.size()) / (D * p.tstar() * c.scale));
    }
    add_row(res, "tran-directions", k, D, worst_dir, 4.0, worst_dir, 4.0, worst_dir <= 4.0);
    int worst_cubes = 0;
    for (const auto& [key, n] : cubes) worst_cubes = std::max(worst_cubes, n);
    add_row(res, "tran-cubes", k, D, worst_cubes, 2.0 * D * D, worst_cubes / static_cast<double>(D * D), 2.0, worst_cubes <= 2 * D * D);
  }
  return res;
}

BatteryResult run_battery(const std::string& which, std::uint64_t seed) {
  if (which == "wongkew") return wongkew_battery(seed);
  if (which == "segments") return segment_battery(seed);
  if (which == "incidence") return incidence_battery(seed);
  if (which == "directions") return direction_battery(seed);
  throw ValidationError("unknown battery '" + which + "' (expected wongkew, segments, incidence or directions)");
}

}  // namespace rlab
