#include "rlab/field.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "rlab/error.hpp"

namespace rlab {

Field Field::zeros(Vec2 origin, double spacing, std::size_t nx, std::size_t ny) {
  return on_frame(origin, {1.0, 0.0}, spacing, spacing, nx, ny, {0.0, 0.0});
}

Field Field::on_frame(Vec2 origin, Vec2 axis, double hu, double hv, std::size_t nu, std::size_t nv, Vec2 carrier) {
  Field f;
  f.origin = origin;
  f.axis = axis;
  f.hu = hu;
  f.hv = hv;
  f.nu = nu;
  f.nv = nv;
  f.carrier = carrier;
  f.validate();
  f.data.assign(nu * nv, cd{});
  return f;
}

void Field::validate() const {
  if (!(hu > 0.0) || !(hv > 0.0)) throw ValidationError("field spacing must be positive");
  if (nu < 1 || nv < 1) throw ValidationError("field extent must be at least 1x1");
  if (std::abs(norm(axis) - 1.0) > 1e-12) throw ValidationError("field axis must be a unit vector");
}

namespace {

inline void catmull_rom(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
  w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
  w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}

inline std::size_t wrap(std::int64_t k, std::size_t n) {
  const auto m = static_cast<std::int64_t>(n);
  k %= m;
  return static_cast<std::size_t>(k < 0 ? k + m : k);
}

}  // namespace

cd Field::eval(Vec2 p) const {
  const Vec2 r = p - origin;
  const double s = dot(r, axis) / hu;
  const double t = dot(r, vaxis()) / hv;
  const double fs = std::floor(s), ft = std::floor(t);
  double wu[4], wv[4];
  catmull_rom(s - fs, wu);
  catmull_rom(t - ft, wv);
  const auto is = static_cast<std::int64_t>(fs), it = static_cast<std::int64_t>(ft);
  std::size_t iu[4];
  for (int a = 0; a < 4; ++a) iu[a] = wrap(is - 1 + a, nu);
  cd acc{};
  for (int b = 0; b < 4; ++b) {
    const cd* row = data.data() + wrap(it - 1 + b, nv) * nu;
    cd racc{};
    for (int a = 0; a < 4; ++a) racc += wu[a] * row[iu[a]];
    acc += wv[b] * racc;
  }
  return acc * expi2pi(dot(carrier, p));
}

Vec2 Field::frequency(std::size_t ku, std::size_t kv) const {
  const double fu = static_cast<double>(signed_bin(ku, nu)) / (static_cast<double>(nu) * hu);
  const double fv = static_cast<double>(signed_bin(kv, nv)) / (static_cast<double>(nv) * hv);
  return carrier + axis * fu + vaxis() * fv;
}

bool Field::same_grid(const Field& o) const {
  return origin == o.origin && axis == o.axis && hu == o.hu && hv == o.hv && nu == o.nu && nv == o.nv &&
         carrier == o.carrier;
}

Field& Field::operator*=(cd s) {
  for (auto& v : data) v *= s;
  return *this;
}

Field& Field::operator+=(const Field& o) {
  if (!same_grid(o)) throw ValidationError("field addition needs identical grids");
  for (std::size_t k = 0; k < data.size(); ++k) data[k] += o.data[k];
  return *this;
}

double l2_norm(const Field& f, Exec exec) {
  const double s = reduce_sum(f.data.size(), [&](std::size_t k) { return std::norm(f.data[k]); }, exec);
  return std::sqrt(s * f.cell_area());
}

void check_resolves(const Field& f, const FreqRect& omega) {
  const double nyq_u = 0.5 / f.hu, nyq_v = 0.5 / f.hv;
  for (Vec2 c : omega.polygon()) {
    const Vec2 r = c - f.carrier;
    if (std::abs(dot(r, f.axis)) > nyq_u || std::abs(dot(r, f.vaxis())) > nyq_v)
      throw ResolutionError("frequency tile " + std::to_string(omega.index) + " lies outside the grid's Nyquist box");
  }
  const double df = std::max(1.0 / (static_cast<double>(f.nu) * f.hu), 1.0 / (static_cast<double>(f.nv) * f.hv));
  if (2.0 * omega.short_side / df < 8.0 * (1.0 - 1e-12))
    throw ResolutionError("frequency grid too coarse: fewer than 8 samples across 2*omega's short side");
}

Field restrict_frequency(const Field& f, const FreqRect& omega) {
  check_resolves(f, omega);
  Field g = f;
  fft2d(g.data, g.nu, g.nv, FftDir::forward);
  const double inv = 1.0 / static_cast<double>(g.size());
  for (std::size_t kv = 0; kv < g.nv; ++kv)
    for (std::size_t ku = 0; ku < g.nu; ++ku) {
      cd& c = g.at(ku, kv);
      c = omega.contains(g.frequency(ku, kv)) ? c * inv : cd{};
    }
  fft2d(g.data, g.nu, g.nv, FftDir::inverse);
  return g;
}

namespace {

static_assert(std::endian::native == std::endian::little, "binary field format assumes a little-endian host");

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in, const std::filesystem::path& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ValidationError("truncated field file: " + path.string());
  return v;
}

}  // namespace

void write_field_binary(const Field& f, const std::filesystem::path& path) {
  if (!f.axis_aligned_isotropic()) throw ValidationError("binary field format needs an axis-aligned isotropic grid");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  put(out, f.origin.x);
  put(out, f.origin.y);
  put(out, f.hu);
  put(out, static_cast<std::uint64_t>(f.nu));
  put(out, static_cast<std::uint64_t>(f.nv));
  for (std::size_t k = 0; k < f.size(); ++k) {
    const cd v = f.value(k);
    put(out, v.real());
    put(out, v.imag());
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Field read_field_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  Vec2 origin;
  origin.x = get<double>(in, path);
  origin.y = get<double>(in, path);
  const double h = get<double>(in, path);
  const auto nx = get<std::uint64_t>(in, path);
  const auto ny = get<std::uint64_t>(in, path);
  if (nx == 0 || ny == 0 || nx > (1u << 20) || ny > (1u << 20)) throw ValidationError("bad field dimensions in " + path.string());
  Field f = Field::zeros(origin, h, nx, ny);
  for (auto& v : f.data) {
    const double re = get<double>(in, path);
    const double im = get<double>(in, path);
    v = {re, im};
  }
  return f;
}

void write_field_csv(const Field& f, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.precision(17);
  out << "x,y,re,im\n";
  for (std::size_t k = 0; k < f.size(); ++k) {
    const Vec2 p = f.position(k);
    const cd v = f.value(k);
    out << p.x << ',' << p.y << ',' << v.real() << ',' << v.imag() << '\n';
  }
}

Field TileFrame::blank() const {
  const double hu = W / oversample, hv = L / oversample;
  const Vec2 u = omega.tangent, v = perp(u);
  const Vec2 origin = u * (-0.5 * period_u()) + v * (-0.5 * period_v());
  return Field::on_frame(origin, u, hu, hv, static_cast<std::size_t>(ku_cells * oversample),
                         static_cast<std::size_t>(kv_cells * oversample), omega.center);
}

std::vector<Tube> TileFrame::tubes() const {
  std::vector<Tube> out;
  out.reserve(static_cast<std::size_t>(ku_cells * kv_cells));
  const Vec2 e = omega.normal, a = perp(e);
  for (std::int64_t k = -kv_cells / 2; k < kv_cells / 2; ++k)
    for (std::int64_t m = -ku_cells / 2; m < ku_cells / 2; ++m) {
      Tube t;
      t.center = e * (static_cast<double>(k) * L) + a * (static_cast<double>(m) * W);
      t.dir = e;
      t.length = L;
      t.width = W;
      t.omega = omega.index;
      t.lattice_long = k;
      t.lattice_wide = m;
      out.push_back(t);
    }
  return out;
}

TileFrame make_tile_frame(const FreqRect& omega, int oversample) {
  if (oversample < 4) throw ValidationError("tile frame oversampling must be >= 4");
  // perp(normal) must be the tangent so the frame's u axis is the tubes' across axis.
  if (norm(perp(omega.normal) - omega.tangent) > 1e-12) throw ValidationError("tile frame: inconsistent tile axes");
  TileFrame fr;
  fr.omega = omega;
  fr.L = 1.0 / omega.short_side;
  fr.W = 1.0 / omega.long_side;
  fr.oversample = oversample;
  fr.ku_cells = 2 * static_cast<std::int64_t>(std::ceil(2.0 * fr.L / fr.W - 1e-9));
  fr.kv_cells = 4;
  return fr;
}

cd TiledField::eval(Vec2 p) const {
  cd s{};
  for (const auto& part : parts) s += part.eval(p);
  return s;
}

double TiledField::l2_norm(Exec exec) const {
  double s = 0.0;
  for (const auto& part : parts) {
    const double n = rlab::l2_norm(part, exec);
    s += n * n;
  }
  return std::sqrt(s);
}

TiledField& TiledField::operator*=(cd s) {
  for (auto& part : parts) part *= s;
  return *this;
}

}  // namespace rlab
