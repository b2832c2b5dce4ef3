#include "rlab/variety.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <random>

#include "rlab/error.hpp"

namespace rlab {

VarietySample::VarietySample(std::vector<VarietyPoint> pts, const Box& region, double bucket)
    : pts_(std::move(pts)), region_(region), bucket_(bucket) {
  if (!(bucket_ > 0.0)) throw ValidationError("VarietySample: bucket size must be positive");
  if (pts_.empty()) return;
  // Grow the region so every point lands in a bucket.
  for (const auto& p : pts_) {
    region_.lo.x = std::min(region_.lo.x, p.z.x);
    region_.lo.y = std::min(region_.lo.y, p.z.y);
    region_.hi.x = std::max(region_.hi.x, p.z.x);
    region_.hi.y = std::max(region_.hi.y, p.z.y);
  }
  auto count = [&](double extent) {
    const double n = std::floor(extent / bucket_) + 1.0;
    return static_cast<std::size_t>(std::clamp(n, 1.0, 4096.0));
  };
  nx_ = count(region_.width());
  ny_ = count(region_.height());
  bucket_ = std::max({bucket_, region_.width() / static_cast<double>(nx_), region_.height() / static_cast<double>(ny_)});
  auto cell = [&](Vec2 z) {
    const auto i = std::min(nx_ - 1, static_cast<std::size_t>((z.x - region_.lo.x) / bucket_));
    const auto j = std::min(ny_ - 1, static_cast<std::size_t>((z.y - region_.lo.y) / bucket_));
    return j * nx_ + i;
  };
  start_.assign(nx_ * ny_ + 1, 0);
  for (const auto& p : pts_) ++start_[cell(p.z) + 1];
  for (std::size_t c = 0; c < nx_ * ny_; ++c) start_[c + 1] += start_[c];
  order_.resize(pts_.size());
  std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t k = 0; k < pts_.size(); ++k) order_[fill[cell(pts_[k].z)]++] = static_cast<std::uint32_t>(k);
}

bool VarietySample::bucket_range(const Box& b, std::size_t& i0, std::size_t& i1, std::size_t& j0, std::size_t& j1) const {
  if (b.hi.x < region_.lo.x || b.hi.y < region_.lo.y || b.lo.x > region_.hi.x || b.lo.y > region_.hi.y) return false;
  auto idx = [&](double v, double lo, std::size_t n) {
    const double t = std::floor((v - lo) / bucket_);
    return static_cast<std::size_t>(std::clamp(t, 0.0, static_cast<double>(n - 1)));
  };
  i0 = idx(b.lo.x, region_.lo.x, nx_);
  i1 = idx(b.hi.x, region_.lo.x, nx_);
  j0 = idx(b.lo.y, region_.lo.y, ny_);
  j1 = idx(b.hi.y, region_.lo.y, ny_);
  return true;
}

namespace {

struct Candidate {
  Vec2 z;
  Vec2 grad;
};

Vec2 bisect_edge(const Polynomial2& P, Vec2 a, Vec2 b, double va, int steps) {
  for (int s = 0; s < steps; ++s) {
    const Vec2 m = (a + b) * 0.5;
    const double vm = P(m);
    if (vm == 0.0) return m;
    if ((vm > 0.0) == (va > 0.0)) {
      a = m;
      va = vm;
    } else {
      b = m;
    }
  }
  return (a + b) * 0.5;
}

// Fine lattice of nx x ny cells over `region`, processed in blocks of
// `factor` x `factor` cells. Each lattice edge and node belongs to exactly one
// block. Blocks rejected by `keep` are skipped.
template <class Keep>
std::vector<VarietyPoint> sample_blocks(const Polynomial2& P, const Box& region, std::size_t nx, std::size_t ny, std::size_t factor,
                                        const SampleOptions& opt, Keep&& keep, double gmax_probe) {
  const double hx = region.width() / static_cast<double>(nx);
  const double hy = region.height() / static_cast<double>(ny);
  const std::size_t bx = (nx + factor - 1) / factor, by = (ny + factor - 1) / factor;
  std::vector<std::vector<Candidate>> found(bx * by);
  for_each_index(
      bx * by,
      [&](std::size_t blk) {
        const std::size_t I = blk % bx, J = blk / bx;
        const std::size_t i0 = I * factor, j0 = J * factor;
        const std::size_t ci = std::min(factor, nx - i0), cj = std::min(factor, ny - j0);
        if (!keep(i0, j0, ci, cj)) return;
        const bool last_col = I + 1 == bx, last_row = J + 1 == by;
        const std::size_t w = ci + 1;
        std::vector<double> v(w * (cj + 1));
        auto node = [&](std::size_t c, std::size_t r) {
          return Vec2{region.lo.x + static_cast<double>(i0 + c) * hx, region.lo.y + static_cast<double>(j0 + r) * hy};
        };
        for (std::size_t r = 0; r <= cj; ++r)
          for (std::size_t c = 0; c <= ci; ++c) v[r * w + c] = P(node(c, r));
        auto& out = found[blk];
        auto push = [&](Vec2 z) { out.push_back({z, P.gradient(z)}); };
        auto edge = [&](std::size_t c0, std::size_t r0, std::size_t c1, std::size_t r1) {
          const double va = v[r0 * w + c0], vb = v[r1 * w + c1];
          if (va == 0.0 || vb == 0.0 || (va > 0.0) == (vb > 0.0)) return;
          push(bisect_edge(P, node(c0, r0), node(c1, r1), va, opt.bisection_steps));
        };
        const std::size_t rmax = last_row ? cj : cj - 1, cmax = last_col ? ci : ci - 1;
        for (std::size_t r = 0; r <= rmax; ++r)
          for (std::size_t c = 0; c <= cmax; ++c) {
            if (v[r * w + c] == 0.0) push(node(c, r));
            if (c < ci) edge(c, r, c + 1, r);
            if (r < cj) edge(c, r, c, r + 1);
          }
      },
      Exec::parallel);
  double gmax = gmax_probe;
  for (const auto& f : found)
    for (const auto& c : f) gmax = std::max(gmax, norm(c.grad));
  const double thr = opt.singular_rel * gmax;
  std::vector<VarietyPoint> pts;
  for (const auto& f : found)
    for (const auto& c : f) {
      const double g = norm(c.grad);
      if (!(g > thr) || g == 0.0) continue;
      pts.push_back({c.z, perp(c.grad) / g, g});
    }
  return pts;
}

double default_bucket(const Box& region, std::size_t n) {
  return std::max(region.width(), region.height()) / static_cast<double>(std::max<std::size_t>(n, 1)) * 4.0;
}

}  // namespace

VarietySample sample_variety(const Polynomial2& P, const Box& region, std::size_t resolution, const SampleOptions& opt) {
  if (region.empty() || !(region.width() > 0.0) || !(region.height() > 0.0)) throw ValidationError("sample_variety: region must be a bounded box of positive area");
  if (resolution < 2) throw ValidationError("sample_variety: resolution must be at least 2");
  const std::size_t n = resolution - 1;
  auto pts = sample_blocks(P, region, n, n, 64, opt, [](std::size_t, std::size_t, std::size_t, std::size_t) { return true; }, 0.0);
  return VarietySample(std::move(pts), region, default_bucket(region, n));
}

VarietySample sample_variety_spaced(const Polynomial2& P, const Box& region, double spacing, const SampleOptions& opt) {
  if (region.empty() || !(region.width() > 0.0) || !(region.height() > 0.0)) throw ValidationError("sample_variety: region must be a bounded box of positive area");
  if (!(spacing > 0.0)) throw ValidationError("sample_variety: spacing must be positive");
  const auto cells = [&](double extent) {
    const double c = std::ceil(extent / spacing);
    if (c > 1e7) throw BudgetError("sample_variety: more than 1e7 lattice cells per axis");
    return std::max<std::size_t>(1, static_cast<std::size_t>(c));
  };
  const std::size_t nx = cells(region.width()), ny = cells(region.height());
  const double hx = region.width() / static_cast<double>(nx), hy = region.height() / static_cast<double>(ny);
  constexpr std::size_t factor = 16;
  // A block is refined when its 3x3 probe values change sign, or when the
  // centre value is small compared to gradient times half-diagonal.
  auto keep = [&](std::size_t i0, std::size_t j0, std::size_t ci, std::size_t cj) {
    const Vec2 lo{region.lo.x + static_cast<double>(i0) * hx, region.lo.y + static_cast<double>(j0) * hy};
    const Vec2 ext{static_cast<double>(ci) * hx, static_cast<double>(cj) * hy};
    bool pos = false, neg = false;
    double gm = 0.0;
    for (int b = 0; b < 3; ++b)
      for (int a = 0; a < 3; ++a) {
        Vec2 g;
        const double v = P.value_and_gradient(lo + Vec2{ext.x * 0.5 * a, ext.y * 0.5 * b}, g);
        pos |= v >= 0.0;
        neg |= v <= 0.0;
        gm = std::max(gm, norm(g));
      }
    if (pos && neg) return true;
    const double vc = std::abs(P(lo + ext * 0.5));
    return vc <= 2.0 * gm * 0.5 * norm(ext);
  };
  auto pts = sample_blocks(P, region, nx, ny, factor, opt, keep, 0.0);
  return VarietySample(std::move(pts), region, std::max(spacing * factor, default_bucket(region, std::max(nx, ny))));
}

double angle_to_variety(const Tube& T, const VarietyPoint& z) { return line_angle(T.dir, z.tangent); }

double ClassParams::tstar() const { return std::pow(R, delta); }
double ClassParams::rho() const { return std::pow(R, 1.0 + delta); }

void ClassParams::validate() const {
  if (!(R >= 1.0)) throw ValidationError("R must be at least 1");
  if (!(d >= 3.0)) throw ValidationError("d must be at least 3");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
}

double xi_threshold(double xi, const ClassParams& p) { return xi * std::pow(p.R, -p.d + 1.0 + p.delta); }
double delta_threshold(double Delta, const ClassParams& p) { return Delta / p.R; }

namespace {

std::vector<double> dyadics_in(double lo, double hi) {
  std::vector<double> out;
  if (!(hi >= lo)) return out;
  const double eps = 1e-12;
  for (int e = static_cast<int>(std::ceil(std::log2(lo) - eps)); std::exp2(e) <= hi * (1.0 + eps); ++e) out.push_back(std::exp2(e));
  return out;
}

bool delta_admissible(double Delta, const ClassParams& p) {
  const double lo = 0.5 * p.tstar(), hi = p.R / 32.0;
  return Delta >= lo * (1.0 - 1e-12) && Delta <= hi * (1.0 + 1e-12);
}

}  // namespace

std::vector<double> xi_ladder(const ClassParams& p) { return dyadics_in(1.0, std::pow(p.R, p.d - 2.0)); }
std::vector<double> delta_ladder(const ClassParams& p) { return dyadics_in(0.5 * p.tstar(), p.R / 32.0); }

VarietyContext::VarietyContext(VarietySample sample, ClassParams params, double rho)
    : sample_(std::move(sample)), params_(params), rho_(rho) {
  params_.validate();
  if (!(rho_ >= 0.0)) throw ValidationError("wall radius must be nonnegative");
}

VarietyContext VarietyContext::build(const Polynomial2& P, const Box& domain, const ClassParams& params, double per_width) {
  params.validate();
  if (!(per_width > 0.0)) throw ValidationError("per_width must be positive");
  auto s = sample_variety_spaced(P, domain, params.R / per_width);
  return VarietyContext(std::move(s), params, params.rho());
}

namespace {

Box grown(const Box& b, double r) { return {b.lo - Vec2{r, r}, b.hi + Vec2{r, r}}; }

bool polygon_meets_wall(const VarietySample& s, const Polygon& poly, double rho) {
  if (poly.size() < 3) return false;
  bool hit = false;
  s.for_each_in(grown(bounding_box(poly), rho), [&](const VarietyPoint& v) {
    if (distance_to_convex(poly, v.z) <= rho) hit = true;
    return !hit;
  });
  return hit;
}

}  // namespace

bool VarietyContext::meets_wall(const Tube& T) const { return polygon_meets_wall(sample_, T.polygon(params_.tstar()), rho_); }

bool VarietyContext::meets_wall(const Tube& T, const Box& q) const {
  return polygon_meets_wall(sample_, clip_convex(T.polygon(params_.tstar()), box_polygon(q)), rho_);
}

bool VarietyContext::angles_within(const Tube& T, const Cube& q, double threshold) const {
  const double five = 5.0 * params_.tstar();
  return sample_.for_each_in(q.dilated(3.0), [&](const VarietyPoint& v) {
    return !(T.contains(v.z, five) && angle_to_variety(T, v) > threshold);
  });
}

namespace {

// Per tube: flat indices of the grid cubes meeting T* (and overlapping it).
template <class Pred>
std::vector<std::vector<std::int64_t>> per_tube_cubes(const VarietyContext& ctx, const std::vector<Tube>& tubes, const CubeGrid& grid,
                                                      Pred&& pred, Exec exec) {
  std::vector<std::vector<std::int64_t>> out(tubes.size());
  for_each_index(
      tubes.size(),
      [&](std::size_t t) {
        const Polygon star = tubes[t].polygon(ctx.params().tstar());
        std::int64_t i0, i1, j0, j1;
        if (!grid.index_range(bounding_box(star), i0, i1, j0, j1)) return;
        for (std::int64_t j = j0; j <= j1; ++j)
          for (std::int64_t i = i0; i <= i1; ++i) {
            const Cube q = grid.cube(i, j);
            if (!convex_overlap(star, box_polygon(q.box()))) continue;
            if (pred(tubes[t], q)) out[t].push_back(j * grid.per_axis + i);
          }
      },
      exec);
  return out;
}

std::vector<TubeClass> gather(const std::vector<std::vector<std::int64_t>>& per_tube, const CubeGrid& grid, double scale, ScaleMode mode,
                              ClassKind kind, bool complement) {
  std::map<std::int64_t, std::vector<std::size_t>> by_cube;
  for (std::size_t t = 0; t < per_tube.size(); ++t)
    for (auto q : per_tube[t]) by_cube[q].push_back(t);
  std::vector<TubeClass> out;
  for (auto& [q, members] : by_cube) {
    TubeClass c;
    c.scale = scale;
    c.mode = mode;
    c.kind = kind;
    c.cube = grid.cube(static_cast<std::size_t>(q));
    c.complement = complement;
    c.members = std::move(members);
    out.push_back(std::move(c));
  }
  return out;
}

double threshold_for(double scale, ScaleMode mode, const ClassParams& p) {
  return mode == ScaleMode::Xi ? xi_threshold(scale, p) : delta_threshold(scale, p);
}

}  // namespace

std::vector<TubeClass> classify(const VarietyContext& ctx, const std::vector<Tube>& tubes, const CubeGrid& grid, double scale,
                                ScaleMode mode, Exec exec) {
  const ClassParams& p = ctx.params();
  if (mode == ScaleMode::Delta && !delta_admissible(scale, p))
    throw ValidationError("classify: Delta must lie in [R^delta/2, R/32] (got " + std::to_string(scale) + ")");
  if (mode == ScaleMode::Xi && (scale < 1.0 || scale > std::pow(p.R, p.d - 2.0) * (1.0 + 1e-12)))
    throw ValidationError("classify: Xi must lie in [1, R^(d-2)] (got " + std::to_string(scale) + ")");
  const double thr = threshold_for(scale, mode, p);
  auto members = per_tube_cubes(ctx, tubes, grid, [&](const Tube& T, const Cube& q) { return ctx.member(T, q, thr); }, exec);
  return gather(members, grid, scale, mode, mode == ScaleMode::Xi ? ClassKind::tangential : ClassKind::transverse, false);
}

TangTranSplit tang_tran_split(const VarietyContext& ctx, const std::vector<Tube>& tubes, const Cube& root, Exec exec) {
  const ClassParams& p = ctx.params();
  TangTranSplit out;
  out.xi_levels = xi_ladder(p);
  out.delta_levels = delta_ladder(p);
  out.complement_at_xi = out.delta_levels.empty();

  struct Level {
    double scale;
    ScaleMode mode;
    CubeGrid grid;
  };
  std::vector<Level> levels;
  for (double xi : out.xi_levels) levels.push_back({xi, ScaleMode::Xi, cube_grid(root, xi, ScaleMode::Xi, p.scale())});
  for (double dl : out.delta_levels) levels.push_back({dl, ScaleMode::Delta, cube_grid(root, dl, ScaleMode::Delta, p.scale())});

  std::vector<std::uint8_t> walled(tubes.size());
  for_each_index(tubes.size(), [&](std::size_t t) { walled[t] = ctx.meets_wall(tubes[t]) ? 1 : 0; }, exec);
  for (std::size_t t = 0; t < tubes.size(); ++t)
    if (!walled[t]) out.cell.push_back(t);
  if (levels.empty()) return out;

  std::vector<std::vector<std::int64_t>> prev;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const Level& L = levels[l];
    const double thr = threshold_for(L.scale, L.mode, p);
    auto mem = per_tube_cubes(ctx, tubes, L.grid, [&](const Tube& T, const Cube& q) { return ctx.member(T, q, thr); }, exec);
    for (auto& v : mem) std::sort(v.begin(), v.end());
    std::vector<std::vector<std::int64_t>> peeled(tubes.size());
    if (l == 0) {
      peeled = mem;
    } else {
      const CubeGrid& pg = levels[l - 1].grid;
      for (std::size_t t = 0; t < tubes.size(); ++t)
        for (auto q : mem[t]) {
          const auto parent = pg.index_of(L.grid.cube(static_cast<std::size_t>(q)).center());
          if (!std::binary_search(prev[t].begin(), prev[t].end(), parent)) peeled[t].push_back(q);
        }
    }
    const ClassKind kind = L.mode == ScaleMode::Xi ? ClassKind::tangential : ClassKind::transverse;
    auto classes = gather(peeled, L.grid, L.scale, L.mode, kind, false);
    auto& dst = kind == ClassKind::tangential ? out.tang : out.tran;
    dst.insert(dst.end(), classes.begin(), classes.end());

    if (l + 1 == levels.size()) {
      // (T_top[Q])^c among the tubes whose T* meets W cap Q.
      auto comp = per_tube_cubes(
          ctx, tubes, L.grid,
          [&](const Tube& T, const Cube& q) { return ctx.meets_wall(T, q.box()) && !ctx.angles_within(T, q, thr); }, exec);
      auto cc = gather(comp, L.grid, L.scale, L.mode, ClassKind::transverse, true);
      out.tran.insert(out.tran.end(), cc.begin(), cc.end());
    }
    prev = std::move(mem);
  }
  return out;
}

double distance_to_variety(const Polynomial2& P, Vec2 q, const DistanceMap* fallback) {
  Vec2 z;
  const bool ok = project_to_zero_set(P, q, z);
  const double dn = ok ? norm(z - q) : std::numeric_limits<double>::infinity();
  if (!fallback) return dn;
  const double g = fallback->at(q);
  if (!std::isfinite(g)) return dn;
  const double h = std::max(fallback->grid.hx(), fallback->grid.hy());
  // A converged foot point is a true zero, so dn never undercuts the distance;
  // a much larger dn means Newton landed on a farther branch.
  return dn <= g + 2.0 * h ? dn : g;
}

VolumeEstimate neighborhood_volume(const Polynomial2& P, double rho, const Box& domain, std::size_t n_samples, std::uint64_t seed,
                                   Exec exec) {
  if (!(rho > 0.0)) throw ValidationError("neighborhood_volume: rho must be positive");
  if (n_samples == 0) throw ValidationError("neighborhood_volume: need at least one sample");
  if (!(domain.area() > 0.0)) throw ValidationError("neighborhood_volume: domain must have positive area");
  GridSpec grid{domain, 1024, 1024};
  const auto values = sample_on_grid(P, grid, exec);
  const DistanceMap dm = distance_to_crossings(grid, {&values});
  const double h = std::max(grid.hx(), grid.hy());

  auto inside = [&](Vec2 q) {
    const double g = dm.at(q);
    // Clear cases are settled by the distance map; the band around rho goes to Newton.
    if (g > rho + 2.0 * h) return false;
    if (g < rho - 2.0 * h) return true;
    return distance_to_variety(P, q, &dm) <= rho;
  };
  const std::size_t nblocks = (n_samples + kReduceBlock - 1) / kReduceBlock;
  const double hits = reduce_sum(
      nblocks,
      [&](std::size_t b) {
        std::seed_seq ss{seed, static_cast<std::uint64_t>(b), std::uint64_t{0x701u}};
        std::mt19937_64 rng(ss);
        std::uniform_real_distribution<double> ux(domain.lo.x, domain.hi.x), uy(domain.lo.y, domain.hi.y);
        const std::size_t lo = b * kReduceBlock, hi = std::min(n_samples, lo + kReduceBlock);
        double c = 0.0;
        for (std::size_t k = lo; k < hi; ++k) {
          const Vec2 q{ux(rng), uy(rng)};
          if (inside(q)) c += 1.0;
        }
        return c;
      },
      exec);
  const double n = static_cast<double>(n_samples);
  const double frac = hits / n;
  return {frac * domain.area(), domain.area() * std::sqrt(frac * (1.0 - frac) / n)};
}

int transverse_segments(const Polynomial2& P, const Tube& T, double a, double rho) {
  if (!(a > 0.0 && a < M_PI / 2.0)) throw ValidationError("transverse_segments: angle must lie in (0, pi/2)");
  if (!(rho > 0.0)) throw ValidationError("transverse_segments: rho must be positive");
  const double seg = rho / a;
  const auto nseg = static_cast<std::int64_t>(std::ceil(T.length / seg - 1e-12));
  const double spacing = std::min(T.width, seg) / 16.0;
  const auto s = sample_variety_spaced(P, bounding_box(T.polygon()), spacing);
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(std::max<std::int64_t>(nseg, 1)), 0);
  for (const auto& v : s.points()) {
    if (!T.contains(v.z) || angle_to_variety(T, v) < a) continue;
    const auto k = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(T.along(v.z) / seg)), 0, nseg - 1);
    hit[static_cast<std::size_t>(k)] = 1;
  }
  return static_cast<int>(std::count(hit.begin(), hit.end(), 1));
}

namespace {

void check_family(double L, double W, std::size_t J) {
  if (!(L > 0.0 && W > 0.0)) throw ValidationError("tube dimensions must be positive");
  if (static_cast<double>(J) > 10.0 * L / W) throw ValidationError("direction family violates J <= 10 L / W");
}

// Direction angle in [0, pi).
double direction_angle(Vec2 dir) {
  double t = std::atan2(dir.y, dir.x);
  if (t < 0.0) t += M_PI;
  if (t >= M_PI) t -= M_PI;
  return t;
}

}  // namespace

int direction_count(const std::vector<Tube>& tubes, const Polynomial2& P, Vec2 center, double radius, double width, double L, double W,
                    std::size_t J) {
  check_family(L, W, J);
  if (!(radius > 0.0 && width > 0.0)) throw ValidationError("direction_count: radius and width must be positive");
  const Box box{center - Vec2{radius, radius}, center + Vec2{radius, radius}};
  GridSpec grid{box, 1024, 1024};
  const auto values = sample_on_grid(P, grid);
  const DistanceMap dm = distance_to_crossings(grid, {&values});

  std::vector<std::uint8_t> inside(tubes.size(), 0);
  for_each_index(
      tubes.size(),
      [&](std::size_t t) {
        const Tube& T = tubes[t];
        for (const Vec2& c : T.polygon())
          if (norm(c - center) > radius) return;
        const double step = std::min(T.width, T.length) / 4.0;
        const auto nu = static_cast<int>(std::ceil(T.length / step)), nv = static_cast<int>(std::ceil(T.width / step));
        for (int j = 0; j <= nv; ++j)
          for (int i = 0; i <= nu; ++i) {
            const Vec2 q = T.center + T.dir * (T.length * (static_cast<double>(i) / nu - 0.5)) +
                           T.across() * (T.width * (static_cast<double>(j) / nv - 0.5));
            if (distance_to_variety(P, q, &dm) > width) return;
          }
        inside[t] = 1;
      },
      Exec::parallel);
  std::vector<double> angles;
  for (std::size_t t = 0; t < tubes.size(); ++t)
    if (inside[t]) angles.push_back(direction_angle(tubes[t].dir));
  std::sort(angles.begin(), angles.end());
  int count = 0;
  for (std::size_t k = 0; k < angles.size(); ++k)
    if (k == 0 || angles[k] - angles[k - 1] > 1e-12) ++count;
  if (count > 1 && angles.back() - angles.front() > M_PI - 1e-12) --count;  // 0 and pi are the same line
  return count;
}

double overlap_sum(const Tube& T, const std::vector<Tube>& family) {
  check_family(T.length, T.width, family.size());
  std::vector<double> angles;
  for (const auto& S : family) angles.push_back(direction_angle(S.dir));
  std::sort(angles.begin(), angles.end());
  for (std::size_t k = 1; k < angles.size(); ++k)
    if (angles[k] - angles[k - 1] <= 1e-12) throw ValidationError("overlap_sum: family directions must be distinct");
  if (angles.size() > 1 && angles.back() - angles.front() >= M_PI - 1e-12) throw ValidationError("overlap_sum: family directions must be distinct");
  const Polygon tp = T.polygon();
  double s = 0.0;
  for (const auto& S : family) s += intersection_area(S.polygon(), tp);
  return s;
}

std::vector<Tube> direction_family(Vec2 center, double L, double W, std::size_t J) {
  std::vector<Tube> out;
  for (std::size_t k = 0; k < J; ++k) {
    const double t = M_PI * static_cast<double>(k) / static_cast<double>(J);
    Tube tb;
    tb.center = center;
    tb.dir = {std::cos(t), std::sin(t)};
    tb.length = L;
    tb.width = W;
    out.push_back(tb);
  }
  return out;
}

}  // namespace rlab
