#include "rlab/tangtran.hpp"

#include <cmath>
#include <map>
#include <random>

#include "rlab/error.hpp"

namespace rlab {

double bump_at(const TileFrame& fr, const Tube& T, Vec2 x) {
  const Vec2 u = fr.omega.tangent;
  const Vec2 r = x - T.center;
  return fejer_periodic(dot(r, u) / fr.W, fr.ku_cells) * fejer_periodic(dot(r, perp(u)) / fr.L, fr.kv_cells);
}

Partition field_partition(const TiledField& f, double d, int D, std::uint64_t seed, std::size_t density_n, const PartitionOptions& opt) {
  if (f.frames.empty()) throw ValidationError("field_partition: field has no tile parts");
  const Cube root = root_cube(f.frames[0].W, d);
  const GridSpec g{root.box(), density_n, density_n};
  std::vector<double> dens(g.size());
  for_each_index(g.size(), [&](std::size_t k) { dens[k] = std::norm(f.eval(g.center(k))); }, opt.bisect.exec);
  return partition(MassDistribution::from_density(g, dens), D, root.box(), seed, opt);
}

namespace {

double abs_pow(cd z, double p) { return std::pow(std::abs(z), p); }

struct Sample {
  Vec2 x;
  bool wall;
};

}  // namespace

TangTranRecord compute_tang_tran(const RunConfig& config, const TiledField& f, const Partition& part, const TangTranOptions& opt) {
  config.validate();
  if (f.frames.empty() || f.frames.size() != f.parts.size()) throw ValidationError("tang-tran: field has no tile parts");
  const double R = f.frames[0].W;
  const double d = config.d;
  const ClassParams params{R, d, config.delta};
  const Cube root = root_cube(R, d);
  const Box& dom = part.grid.domain;
  if (!(dom.contains(root.lo) && dom.contains(root.lo + Vec2{root.side, root.side})))
    throw ValidationError("tang-tran: the partition grid must cover the root cube");
  const double p = config.p;
  const double radius = std::pow(R, d);

  const auto mask = wall(part, params.rho());
  auto in_wall = [&](Vec2 x) {
    std::size_t i, j;
    return part.grid.locate(x, i, j) && mask[part.grid.flat(i, j)] != 0;
  };

  // Stratified points of B(R^d).
  const std::size_t cells = opt.cells;
  if (cells < 2) throw ValidationError("tang-tran: need at least 2x2 strata");
  const double h = 2.0 * radius / static_cast<double>(cells);
  const double w = h * h;
  std::vector<std::vector<Sample>> rows(cells);
  for_each_index(
      cells,
      [&](std::size_t j) {
        std::seed_seq ss{opt.seed, static_cast<std::uint64_t>(j), std::uint64_t{0x7a9}};
        std::mt19937_64 rng(ss);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (std::size_t i = 0; i < cells; ++i) {
          const double a = uni(rng), b = uni(rng);
          const Vec2 x{-radius + (static_cast<double>(i) + a) * h, -radius + (static_cast<double>(j) + b) * h};
          if (norm(x) <= radius) rows[j].push_back({x, in_wall(x)});
        }
      },
      opt.exec);
  std::vector<Sample> pts;
  for (auto& r : rows) pts.insert(pts.end(), r.begin(), r.end());
  const std::size_t np = pts.size(), nparts = f.parts.size();
  std::vector<cd> fw(np * nparts);
  for_each_index(
      np, [&](std::size_t k) {
        for (std::size_t q = 0; q < nparts; ++q) fw[k * nparts + q] = f.parts[q].eval(pts[k].x);
      },
      opt.exec);
  auto fsum = [&](std::size_t k) {
    cd s{};
    for (std::size_t q = 0; q < nparts; ++q) s += fw[k * nparts + q];
    return s;
  };

  TangTranRecord rec;
  rec.samples = np;
  rec.total = w * reduce_sum(np, [&](std::size_t k) { return abs_pow(fsum(k), p); }, opt.exec);
  rec.wall_integral = w * reduce_sum(np, [&](std::size_t k) { return pts[k].wall ? abs_pow(fsum(k), p) : 0.0; }, opt.exec);
  rec.cell_term = w * reduce_sum(np, [&](std::size_t k) { return pts[k].wall ? 0.0 : abs_pow(fsum(k), p); }, opt.exec);

  DecomposeOptions dopt;
  dopt.drop_fraction = opt.drop_fraction;
  dopt.use_region = true;
  dopt.region = root.box();
  dopt.exec = opt.exec;
  const auto packets = decompose(f, dopt);
  rec.packets = packets.size();
  std::vector<Tube> tubes;
  for (const auto& pk : packets) tubes.push_back(pk.tube);

  const VarietyContext ctx = VarietyContext::build(part.polynomial, root.box(), params);
  const TangTranSplit split = tang_tran_split(ctx, tubes, root, opt.exec);
  rec.cell_tubes = split.cell.size();
  rec.complement_at_xi = split.complement_at_xi;

  std::vector<std::size_t> wall_pts;
  for (std::size_t k = 0; k < np; ++k)
    if (pts[k].wall) wall_pts.push_back(k);

  auto class_integral = [&](const TubeClass& c) {
    const Box q = c.cube.box();
    std::vector<std::size_t> inside;
    for (auto k : wall_pts)
      if (q.contains(pts[k].x)) inside.push_back(k);
    return w * reduce_sum(
                   inside.size(),
                   [&](std::size_t n) {
                     const std::size_t k = inside[n];
                     cd s{};
                     for (auto m : c.members) {
                       const WavePacket& pk = packets[m];
                       s += fw[k * nparts + pk.part] * bump_at(f.frames[pk.part], pk.tube, pts[k].x);
                     }
                     return abs_pow(s, p);
                   },
                   opt.exec);
  };
  auto accumulate = [&](const std::vector<TubeClass>& classes, std::vector<TangTranTerm>& terms) {
    std::map<std::tuple<int, double, bool>, TangTranTerm> by_level;
    for (const auto& c : classes) {
      auto& t = by_level[{c.mode == ScaleMode::Xi ? 0 : 1, c.scale, c.complement}];
      t.scale = c.scale;
      t.mode = c.mode;
      t.complement = c.complement;
      t.value += class_integral(c);
      ++t.classes;
      t.memberships += c.members.size();
    }
    for (auto& [key, t] : by_level) terms.push_back(t);
  };
  accumulate(split.tang, rec.tang);
  accumulate(split.tran, rec.tran);

  double parts_sum = rec.cell_term;
  for (const auto& t : rec.tang) parts_sum += t.value;
  for (const auto& t : rec.tran) parts_sum += t.value;
  rec.residual = rec.total - parts_sum;
  rec.relative_residual = rec.total > 0.0 ? rec.residual / rec.total : 0.0;
  rec.wall_lp = std::pow(rec.wall_integral, 1.0 / p);
  rec.wall_rhs = config.D * std::pow(R, -0.5 * d + 3.0 * config.delta) * f.l2_norm(opt.exec);
  return rec;
}

}  // namespace rlab
