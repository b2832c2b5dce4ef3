#include "rlab/scan.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "rlab/error.hpp"
#include "rlab/fft.hpp"
#include "rlab/wavepacket.hpp"

namespace rlab {

namespace {

// Lattice tube whose centre sits on grid index (0, 0) of the frame.
Tube corner_tube(const TileFrame& fr, const Field& g) {
  Tube t;
  t.dir = fr.omega.normal;
  t.length = fr.L;
  t.width = fr.W;
  t.center = g.origin;
  return t;
}

Field synthesize(const TileFrame& fr, Family family, double radius, std::mt19937_64& rng, double amplitude) {
  Field g = fr.blank();
  const std::size_t nu = g.nu, nv = g.nv, q = static_cast<std::size_t>(fr.oversample);
  const auto ku = static_cast<std::size_t>(fr.ku_cells), kv = static_cast<std::size_t>(fr.kv_cells);
  const BumpProfile bp = bump_profile(fr, corner_tube(fr, g));
  std::vector<cd> U(bp.u.begin(), bp.u.end());
  fft1d(U, FftDir::forward);
  std::uniform_real_distribution<double> phase(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::vector<cd>> rows(kv, std::vector<cd>(nu));
  for (std::size_t k = 0; k < kv; ++k) {
    auto& a = rows[k];
    for (std::size_t m = 0; m < ku; ++m) {
      // Draw for every lattice cell so the stream does not depend on the radius.
      cd c{1.0, 0.0};
      if (family == Family::random_phase) c = expi2pi(phase(rng));
      else if (family == Family::random_sign) c = coin(rng) ? cd{1.0, 0.0} : cd{-1.0, 0.0};
      const Vec2 centre = g.origin + g.axis * (static_cast<double>(m) * fr.W) + g.vaxis() * (static_cast<double>(k) * fr.L);
      if (norm(centre) <= radius) a[m * q] = c * amplitude;
    }
    fft1d(a, FftDir::forward);
    for (std::size_t i = 0; i < nu; ++i) a[i] *= U[i] / static_cast<double>(nu);
    fft1d(a, FftDir::inverse);
  }
  for (std::size_t j = 0; j < nv; ++j)
    for (std::size_t i = 0; i < nu; ++i) {
      cd s{};
      for (std::size_t k = 0; k < kv; ++k) s += bp.v[(j + nv - k * q % nv) % nv] * rows[k][i];
      g.at(i, j) = s;
    }
  return g;
}

std::uint64_t sample_seed(std::uint64_t seed, int N) {
  std::seed_seq ss{seed, static_cast<std::uint64_t>(N), std::uint64_t{0x5ca1}};
  std::uint32_t out[2];
  ss.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

void check_budget(const RunConfig& c) {
  int largest = 0;
  bool over = false;
  for (int N : c.N) {
    const double mb = test_function_bytes({static_cast<double>(c.d), N}, c.oversample) / (1024.0 * 1024.0);
    if (mb <= c.memory_budget_mb) largest = std::max(largest, N);
    else over = true;
  }
  if (over)
    throw BudgetError("scan: tile fields exceed the memory budget of " + std::to_string(c.memory_budget_mb) +
                      " MB; largest feasible N = " + std::to_string(largest));
}

std::vector<int> sorted_N(const RunConfig& c) {
  std::vector<int> n = c.N;
  std::sort(n.begin(), n.end());
  return n;
}

void finish(ScanReport& r) {
  if (r.rows.size() >= 2) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : r.rows) pts.emplace_back(row.N, row.ratio);
    r.fit = fit_exponent(pts);
  }
}

}  // namespace

TiledField test_function(const CurveParams& curve, Family family, std::uint64_t seed, int oversample, double amplitude) {
  curve.validate();
  const auto tiles = build_frequency_tiles(curve);
  const double radius = std::pow(static_cast<double>(curve.N), curve.d);
  TiledField tf;
  if (family == Family::single) {
    const TileFrame fr = make_tile_frame(tiles[tiles.size() / 2], oversample);
    Tube t = corner_tube(fr, fr.blank());
    t.center = {0.0, 0.0};
    tf.frames.push_back(fr);
    tf.parts.push_back(single_wavepacket(fr, t, amplitude));
    return tf;
  }
  for (const auto& w : tiles) {
    std::seed_seq ss{seed, static_cast<std::uint64_t>(curve.N), static_cast<std::uint64_t>(w.index), std::uint64_t{0xc0ef}};
    std::mt19937_64 rng(ss);
    tf.frames.push_back(make_tile_frame(w, oversample));
    tf.parts.push_back(synthesize(tf.frames.back(), family, radius, rng, amplitude));
  }
  return tf;
}

double test_function_bytes(const CurveParams& curve, int oversample) {
  curve.validate();
  double total = 0.0;
  for (const auto& w : build_frequency_tiles(curve)) {
    const TileFrame fr = make_tile_frame(w, oversample);
    total += static_cast<double>(fr.ku_cells * fr.oversample) * static_cast<double>(fr.kv_cells * fr.oversample) * sizeof(cd);
  }
  return total;
}

ScanRow theorem1_row(const TiledField& f, int N, int d, double p, std::size_t cells, std::uint64_t seed) {
  ScanRow row;
  row.N = N;
  row.rhs = f.l2_norm();
  if (!(row.rhs > 0.0)) throw ValidationError("scan: test function is zero, the ratio is undefined");
  const Ball ball{{0.0, 0.0}, std::pow(static_cast<double>(N), d)};
  if (f.parts.size() == 1) {
    row.lhs = lp_norm(f.parts[0], p, ball);
  } else {
    const SampledNorm s = lp_norm_sampled(f, p, ball, cells, seed);
    row.lhs = s.value;
    // Delta method: d(power^(1/p)) = value / (p power) d(power).
    row.lhs_std_error = s.power > 0.0 ? s.value * s.std_error / (p * s.power) : 0.0;
  }
  row.ratio = row.lhs / row.rhs;
  return row;
}

ScanReport scan_theorem1(const RunConfig& config, Family family, std::uint64_t seed) {
  config.validate(ScanPurpose::theorem1);
  check_budget(config);
  const auto t0 = std::chrono::steady_clock::now();
  ScanReport r;
  r.kind = "theorem1";
  r.family = family;
  r.seed = seed;
  r.config = config;
  r.theory_slope = -0.5 * config.d;
  for (int N : sorted_N(config)) {
    const CurveParams curve{static_cast<double>(config.d), N};
    const TiledField f = test_function(curve, family, seed, config.oversample);
    r.rows.push_back(theorem1_row(f, N, config.d, config.p, config.sample_cells, sample_seed(seed, N)));
  }
  finish(r);
  r.note = "slack = fitted slope - theory slope; the N^eps loss is not a runnable parameter";
  r.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string variant_name(DecouplingVariant v) { return v == DecouplingVariant::conjecture2 ? "conjecture2" : "theorem2"; }

DecouplingVariant parse_variant(const std::string& name) {
  if (name == "conjecture2") return DecouplingVariant::conjecture2;
  if (name == "theorem2") return DecouplingVariant::theorem2;
  throw ValidationError("unknown decoupling variant '" + name + "' (expected conjecture2 or theorem2)");
}

ScanRow decoupling_row(const TiledField& f, int N, int d, double p, DecouplingVariant v, std::size_t cells, std::uint64_t seed) {
  if (!(f.l2_norm() > 0.0)) throw ValidationError("scan: test function is zero, the ratio is undefined");
  const Ball ball{{0.0, 0.0}, std::pow(static_cast<double>(N), d)};
  ScanRow row;
  row.N = N;
  const SampledNorm lhs = lp_norm_sampled(f, p, ball, cells, seed);
  row.lhs = lhs.value;
  row.lhs_std_error = lhs.power > 0.0 ? lhs.value * lhs.std_error / (p * lhs.power) : 0.0;
  const double q = v == DecouplingVariant::conjecture2 ? p : 0.5 * p;
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < f.parts.size(); ++k) {
    TiledField one;
    one.frames = {f.frames[k]};
    one.parts = {f.parts[k]};
    const double nk = lp_norm_sampled(one, q, ball, cells, seed).value;
    sum_sq += nk * nk;
  }
  const double n = static_cast<double>(N);
  const double factor = v == DecouplingVariant::conjecture2 ? std::pow(n, 0.5 - (d + 1.0) / p) : std::pow(n, -(d + 1.0) / p);
  row.rhs = factor * std::sqrt(sum_sq);
  row.ratio = row.lhs / row.rhs;
  return row;
}

ScanReport scan_decoupling(const RunConfig& config, DecouplingVariant variant, Family family, std::uint64_t seed) {
  config.validate(ScanPurpose::decoupling);
  check_budget(config);
  const auto t0 = std::chrono::steady_clock::now();
  ScanReport r;
  r.kind = variant_name(variant);
  r.family = family;
  r.seed = seed;
  r.config = config;
  r.theory_slope = 0.0;
  for (int N : sorted_N(config)) {
    const CurveParams curve{static_cast<double>(config.d), N};
    const TiledField f = test_function(curve, family, seed, config.oversample);
    r.rows.push_back(decoupling_row(f, N, config.d, config.p, variant, config.sample_cells, sample_seed(seed, N)));
  }
  finish(r);
  r.note = "exploratory: growth exponent of lhs/rhs is reported, no threshold is asserted";
  r.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace rlab
