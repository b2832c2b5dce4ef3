#include "rlab/wavepacket.hpp"

#include "rlab/error.hpp"

namespace rlab {

double sinc2(double t) {
  if (std::abs(t) < 1e-8) return 1.0 - (M_PI * t) * (M_PI * t) / 3.0;
  const double s = std::sin(M_PI * t) / (M_PI * t);
  return s * s;
}

double fejer_periodic(double t, std::int64_t K) {
  if (K < 1) throw ValidationError("fejer_periodic: period must be >= 1");
  const double k = static_cast<double>(K);
  const double r = t - k * std::round(t / k);  // r in [-K/2, K/2]
  const double den = k * std::sin(M_PI * r / k);
  if (std::abs(den) < 1e-7) {
    // Removable singularity at r = 0: 1 - (pi r)^2 (1 - 1/K^2) / 3 + ...
    return 1.0 - (M_PI * r) * (M_PI * r) * (1.0 - 1.0 / (k * k)) / 3.0;
  }
  const double num = std::sin(M_PI * r);
  return num * num / (den * den);
}

BumpProfile bump_profile(const TileFrame& frame, const Tube& tube) {
  Field g = frame.blank();
  BumpProfile bp;
  bp.u.resize(g.nu);
  bp.v.resize(g.nv);
  const double cu = dot(tube.center - g.origin, g.axis);
  const double cv = dot(tube.center - g.origin, g.vaxis());
  for (std::size_t i = 0; i < g.nu; ++i) bp.u[i] = fejer_periodic((static_cast<double>(i) * g.hu - cu) / frame.W, frame.ku_cells);
  for (std::size_t j = 0; j < g.nv; ++j) bp.v[j] = fejer_periodic((static_cast<double>(j) * g.hv - cv) / frame.L, frame.kv_cells);
  return bp;
}

Field make_bump(const TileFrame& frame, const Tube& tube) {
  if (std::abs(std::abs(dot(tube.dir, frame.omega.normal)) - 1.0) > 1e-12 || std::abs(tube.length - frame.L) > 1e-9 * frame.L ||
      std::abs(tube.width - frame.W) > 1e-9 * frame.W)
    throw ValidationError("make_bump: tube is not a cell of this tile's dual lattice");
  Field g = frame.blank();
  g.carrier = {0.0, 0.0};
  const BumpProfile bp = bump_profile(frame, tube);
  for (std::size_t j = 0; j < g.nv; ++j)
    for (std::size_t i = 0; i < g.nu; ++i) g.at(i, j) = bp.u[i] * bp.v[j];
  return g;
}

Field make_bump(const Tube& tube, const CurveParams& curve, int oversample) {
  const auto tiles = build_frequency_tiles(curve);
  if (tube.omega < 1 || tube.omega > curve.N) throw ValidationError("make_bump: tube has no tile index");
  return make_bump(make_tile_frame(tiles[static_cast<std::size_t>(tube.omega - 1)], oversample), tube);
}

std::vector<TileFrame> tile_frames(const CurveParams& curve, int oversample) {
  std::vector<TileFrame> out;
  for (const auto& w : build_frequency_tiles(curve)) out.push_back(make_tile_frame(w, oversample));
  return out;
}

namespace {

inline double frame_cell(double h, int q) { return h * q; }

inline std::int64_t wrap_index(std::int64_t k, std::int64_t n) {
  k %= n;
  return k < 0 ? k + n : k;
}

// mass2[k * ku + m] = sum_j v_k(j)^2 sum_i u_m(i)^2 |f_ij|^2. The u profiles of
// one lattice row are cyclic shifts by `oversample` samples, so the inner sum
// is a circular correlation done with one FFT per grid row.
std::vector<double> packet_masses(const TileFrame& frame, const Field& part, Exec exec) {
  const std::size_t nu = part.nu, nv = part.nv;
  const auto ku = static_cast<std::size_t>(frame.ku_cells), kv = static_cast<std::size_t>(frame.kv_cells);
  const auto q = static_cast<std::size_t>(frame.oversample);
  // Profiles of the tube with lattice indices (-ku/2, -kv/2), i.e. the one whose centre sits at grid index 0.
  Tube t0;
  t0.dir = frame.omega.normal;
  t0.length = frame.L;
  t0.width = frame.W;
  const Field g = frame.blank();
  t0.center = g.origin;
  const BumpProfile bp = bump_profile(frame, t0);
  std::vector<cd> a2(nu);
  for (std::size_t i = 0; i < nu; ++i) a2[i] = bp.u[i] * bp.u[i];
  fft1d(a2, FftDir::forward);
  std::vector<double> corr(nv * ku, 0.0);  // corr[j * ku + m]
  for_each_index(
      nv,
      [&](std::size_t j) {
        std::vector<cd> h(nu);
        for (std::size_t i = 0; i < nu; ++i) h[i] = std::norm(part.at(i, j));
        fft1d(h, FftDir::forward);
        for (std::size_t k = 0; k < nu; ++k) h[k] *= std::conj(a2[k]);
        fft1d(h, FftDir::inverse);
        for (std::size_t m = 0; m < ku; ++m) corr[j * ku + m] = h[m * q].real() / static_cast<double>(nu);
      },
      exec);
  std::vector<double> mass2(kv * ku, 0.0);
  for (std::size_t k = 0; k < kv; ++k)
    for (std::size_t m = 0; m < ku; ++m) {
      double s = 0.0;
      for (std::size_t j = 0; j < nv; ++j) {
        const double b = bp.v[(j + nv - (k * q) % nv) % nv];
        s += b * b * corr[j * ku + m];
      }
      mass2[k * ku + m] = std::max(0.0, s) * part.cell_area();
    }
  return mass2;
}

}  // namespace

std::vector<WavePacket> decompose(const TiledField& f, const DecomposeOptions& opt) {
  if (f.frames.size() != f.parts.size()) throw ValidationError("decompose: frames and parts differ in length");
  const double total = f.l2_norm(opt.exec);
  std::vector<WavePacket> out;
  if (total == 0.0) return out;
  const Polygon region = opt.use_region ? box_polygon(opt.region) : Polygon{};
  for (std::size_t p = 0; p < f.parts.size(); ++p) {
    const TileFrame& fr = f.frames[p];
    const auto ku = fr.ku_cells, kv = fr.kv_cells;
    const std::vector<double> mass2 = packet_masses(fr, f.parts[p], opt.exec);
    const Field g = fr.blank();
    for (const Tube& t : fr.tubes()) {
      // Lattice cell of the tube centre, measured on the frame grid.
      const double su = dot(t.center - g.origin, g.axis) / frame_cell(g.hu, fr.oversample);
      const double sv = dot(t.center - g.origin, g.vaxis()) / frame_cell(g.hv, fr.oversample);
      const auto m = static_cast<std::size_t>(wrap_index(std::llround(su), ku));
      const auto k = static_cast<std::size_t>(wrap_index(std::llround(sv), kv));
      const double mass = std::sqrt(mass2[k * static_cast<std::size_t>(ku) + m]);
      if (!(mass > opt.drop_fraction * total)) continue;
      if (opt.use_region && !convex_overlap(t.polygon(), region)) continue;
      out.push_back({p, fr.omega.index, t, mass});
    }
  }
  return out;
}

Field packet_field(const TiledField& f, const WavePacket& packet) {
  const TileFrame& fr = f.frames.at(packet.part);
  Field g = f.parts.at(packet.part);
  const BumpProfile bp = bump_profile(fr, packet.tube);
  for (std::size_t j = 0; j < g.nv; ++j)
    for (std::size_t i = 0; i < g.nu; ++i) g.at(i, j) *= bp.u[i] * bp.v[j];
  return g;
}

TiledField reconstruct(const TiledField& f, const std::vector<WavePacket>& packets) {
  TiledField out;
  out.frames = f.frames;
  for (std::size_t p = 0; p < f.parts.size(); ++p) {
    Field z = f.parts[p];
    std::fill(z.data.begin(), z.data.end(), cd{});
    out.parts.push_back(std::move(z));
  }
  for (const auto& pk : packets) out.parts.at(pk.part) += packet_field(f, pk);
  return out;
}

Field single_wavepacket(const TileFrame& frame, const Tube& tube, double amplitude) {
  Field g = make_bump(frame, tube);
  g.carrier = frame.omega.center;
  g *= cd{amplitude, 0.0};
  return g;
}

TiledField tile_world_field(const Field& world, const CurveParams& curve, int oversample, Exec exec) {
  if (world.carrier != Vec2{0.0, 0.0}) throw ValidationError("tile_world_field: world field must not carry a carrier");
  TiledField out;
  out.frames = tile_frames(curve, oversample);
  std::vector<cd> F = world.data;
  fft2d(F, world.nu, world.nv, FftDir::forward);
  const double inv = 1.0 / static_cast<double>(world.size());
  for (const auto& fr : out.frames) {
    check_resolves(world, fr.omega);
    std::vector<std::pair<Vec2, cd>> modes;
    for (std::size_t kv = 0; kv < world.nv; ++kv)
      for (std::size_t ku = 0; ku < world.nu; ++ku) {
        const Vec2 k = world.frequency(ku, kv);
        const cd c = F[kv * world.nu + ku];
        if (c != cd{} && fr.omega.contains(k)) modes.emplace_back(k, c * inv * expi2pi(-dot(k, world.origin)));
      }
    Field part = fr.blank();
    for_each_index(
        part.size(),
        [&](std::size_t n) {
          const Vec2 x = part.position(n);
          cd s{};
          for (const auto& [k, c] : modes) s += c * expi2pi(dot(k - part.carrier, x));
          part.data[n] = s;
        },
        exec);
    out.parts.push_back(std::move(part));
  }
  return out;
}

double mass_fraction_in(const Field& f, const Tube& tube, double dilation) {
  double in = 0.0, all = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double w = std::norm(f.data[k]);
    all += w;
    if (tube.contains(f.position(k), dilation)) in += w;
  }
  return all > 0.0 ? in / all : 0.0;
}

}  // namespace rlab
