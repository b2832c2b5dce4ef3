#include "rlab/norms.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "rlab/error.hpp"

namespace rlab {

bool domain_contains(const Domain& dom, Vec2 p) {
  return std::visit([p](const auto& d) { return d.contains(p); }, dom);
}

Box domain_bounds(const Domain& dom) {
  if (const auto* b = std::get_if<Ball>(&dom)) {
    const Vec2 r{b->radius, b->radius};
    return {b->center - r, b->center + r};
  }
  return std::get<Box>(dom);
}

double domain_area(const Domain& dom) {
  if (const auto* b = std::get_if<Ball>(&dom)) return M_PI * b->radius * b->radius;
  return std::get<Box>(dom).area();
}

namespace {

void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("L^p exponent must be a finite p >= 1");
}

inline double abs_pow(cd v, double p) {
  const double a2 = std::norm(v);
  if (p == 2.0) return a2;
  if (p == 4.0) return a2 * a2;
  if (p == 8.0) {
    const double a4 = a2 * a2;
    return a4 * a4;
  }
  return std::pow(a2, 0.5 * p);
}

}  // namespace

double lp_power(const Field& f, double p, const Domain& dom, Exec exec) {
  check_p(p);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < f.size(); ++k) hits += domain_contains(dom, f.position(k)) ? 1 : 0;
  if (hits == 0) throw ValidationError("lp_norm: domain contains no grid point");
  const double s = reduce_sum(
      f.size(),
      [&](std::size_t k) { return domain_contains(dom, f.position(k)) ? abs_pow(f.data[k], p) : 0.0; }, exec);
  return s * f.cell_area();
}

double lp_norm(const Field& f, double p, const Domain& dom, Exec exec) {
  return std::pow(lp_power(f, p, dom, exec), 1.0 / p);
}

SampledNorm lp_norm_sampled(const TiledField& f, double p, const Domain& dom, std::size_t cells, std::uint64_t seed,
                            Exec exec) {
  check_p(p);
  if (cells < 1) throw ValidationError("lp_norm_sampled: need at least one stratum");
  const Box bb = domain_bounds(dom);
  const double cw = bb.width() / static_cast<double>(cells), ch = bb.height() / static_cast<double>(cells);
  const double cell_area = cw * ch;
  std::vector<double> row_sum(cells, 0.0), row_sq(cells, 0.0);
  std::vector<std::size_t> row_hits(cells, 0);
  for_each_index(
      cells,
      [&](std::size_t j) {
        std::seed_seq sq{static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(j), std::uint64_t{0x5eed}};
        std::mt19937_64 rng(sq);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double s = 0.0, s2 = 0.0;
        std::size_t hits = 0;
        for (std::size_t i = 0; i < cells; ++i) {
          const double ux = uni(rng), uy = uni(rng);
          const Vec2 x{bb.lo.x + (static_cast<double>(i) + ux) * cw, bb.lo.y + (static_cast<double>(j) + uy) * ch};
          if (!domain_contains(dom, x)) continue;
          const double v = abs_pow(f.eval(x), p);
          s += v;
          s2 += v * v;
          ++hits;
        }
        row_sum[j] = s;
        row_sq[j] = s2;
        row_hits[j] = hits;
      },
      exec);
  SampledNorm out;
  double s = 0.0, s2 = 0.0;
  for (std::size_t j = 0; j < cells; ++j) {
    s += row_sum[j];
    s2 += row_sq[j];
    out.samples += row_hits[j];
  }
  if (out.samples == 0) throw ValidationError("lp_norm_sampled: no sample fell in the domain");
  out.power = s * cell_area;
  const double n = static_cast<double>(out.samples);
  const double mean = s / n;
  const double var = std::max(0.0, s2 / n - mean * mean);
  // iid bound; stratification only lowers the true error.
  out.std_error = cell_area * std::sqrt(var * n);
  out.value = std::pow(out.power, 1.0 / p);
  return out;
}

void MeanValueProblem::validate() const {
  if (N < 1) throw ValidationError("mean value: N must be >= 1");
  if (d < 1) throw ValidationError("mean value: d must be a positive integer");
  if (s < 1) throw ValidationError("mean value: s must be >= 1");
  if (!coeffs.empty() && coeffs.size() != static_cast<std::size_t>(N))
    throw ValidationError("mean value: expected " + std::to_string(N) + " coefficients, got " + std::to_string(coeffs.size()));
}

int mean_value_order(double p) {
  if (!(p >= 2.0) || p != std::floor(p) || static_cast<long long>(p) % 2 != 0 || p > 64.0)
    throw ValidationError("mean value: p must be an even integer >= 2 (exact quadrature needs p = 2s)");
  return static_cast<int>(p / 2.0);
}

namespace {

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int k = 0; k < e; ++k) {
    if (r > (std::int64_t{1} << 62) / std::max<std::int64_t>(b, 1)) throw BudgetError("integer power overflow");
    r *= b;
  }
  return r;
}

}  // namespace

std::pair<std::size_t, std::size_t> exp_sum_grid(const MeanValueProblem& prob, const MeanValueOptions& opt) {
  prob.validate();
  if (opt.grid_factor_x1 < 1 || opt.grid_factor_x2 < 1) throw ValidationError("grid factors must be >= 1");
  const auto s = static_cast<std::int64_t>(prob.s);
  const std::int64_t deg1 = s * (prob.N - 1);
  const std::int64_t deg2 = s * (ipow(prob.N, prob.d) - 1);
  const std::size_t m1 = next_fast_size(static_cast<std::size_t>(deg1 + 1)) * static_cast<std::size_t>(opt.grid_factor_x1);
  const std::size_t m2 = next_fast_size(static_cast<std::size_t>(deg2 + 1)) * static_cast<std::size_t>(opt.grid_factor_x2);
  return {m1, m2};
}

double exp_sum_lp_torus(const MeanValueProblem& prob, const MeanValueOptions& opt) {
  const auto [m1, m2] = exp_sum_grid(prob, opt);
  const double threads = opt.exec == Exec::parallel ? max_threads() : 1;
  const double mb = threads * static_cast<double>(m2) * sizeof(cd) / (1024.0 * 1024.0);
  if (mb > opt.memory_budget_mb)
    throw BudgetError("exp_sum_lp_torus: grid needs " + std::to_string(mb) + " MB, budget " + std::to_string(opt.memory_budget_mb) + " MB");
  std::vector<std::size_t> pos2(static_cast<std::size_t>(prob.N));
  for (int n = 1; n <= prob.N; ++n)
    pos2[static_cast<std::size_t>(n - 1)] = static_cast<std::size_t>(ipow(n, prob.d) % static_cast<std::int64_t>(m2));
  auto coef = [&](int n) { return prob.coeffs.empty() ? cd{1.0, 0.0} : prob.coeffs[static_cast<std::size_t>(n - 1)]; };
  // One inverse 1D FFT per x1 sample: S(i/M1, j/M2) = sum_n a_n e(n i/M1) e(n^d j/M2).
  std::vector<double> row(m1, 0.0);
  auto do_row = [&](std::size_t i, std::vector<cd>& buf) {
    std::fill(buf.begin(), buf.end(), cd{});
    for (int n = 1; n <= prob.N; ++n) {
      const double t = static_cast<double>((static_cast<std::size_t>(n) * i) % m1) / static_cast<double>(m1);
      buf[pos2[static_cast<std::size_t>(n - 1)]] += coef(n) * expi2pi(t);
    }
    fft1d(buf, FftDir::inverse);
    double acc = 0.0;
    for (const cd& v : buf) {
      const double a2 = std::norm(v);
      double pw = 1.0;
      for (int k = 0; k < prob.s; ++k) pw *= a2;
      acc += pw;
    }
    row[i] = acc;
  };
  if (opt.exec == Exec::serial) {
    std::vector<cd> buf(m2);
    for (std::size_t i = 0; i < m1; ++i) do_row(i, buf);
  } else {
#pragma omp parallel
    {
      std::vector<cd> buf(m2);
#pragma omp for schedule(dynamic, 1)
      for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m1); ++i) do_row(static_cast<std::size_t>(i), buf);
    }
  }
  double total = 0.0;
  for (double v : row) total += v;
  return total / (static_cast<double>(m1) * static_cast<double>(m2));
}

namespace {

struct TupleKeys {
  std::vector<std::int64_t> keys;
  std::int64_t count = 0;
};

// Enumerate the N^s ordered s-tuples in lexicographic order, as flat keys
// sum + (s N + 1) * power_sum.
TupleKeys enumerate_keys(int N, int s, int d, std::int64_t max_tuples, Exec exec) {
  if (N < 1 || s < 1 || d < 1) throw ValidationError("vinogradov_count: N, s, d must be positive");
  double tuples = std::pow(static_cast<double>(N), s);
  if (tuples > static_cast<double>(max_tuples))
    throw BudgetError("vinogradov_count: " + std::to_string(static_cast<std::int64_t>(tuples)) + " tuples exceed budget " +
                      std::to_string(max_tuples));
  const std::int64_t nd = ipow(N, d);
  const std::int64_t span = static_cast<std::int64_t>(s) * N + 1;
  if (static_cast<double>(s) * static_cast<double>(nd) * static_cast<double>(span) > 9.0e18)
    throw BudgetError("vinogradov_count: key range overflows 64 bits");
  std::vector<std::int64_t> powd(static_cast<std::size_t>(N) + 1);
  for (int n = 1; n <= N; ++n) powd[static_cast<std::size_t>(n)] = ipow(n, d);
  TupleKeys out;
  out.count = static_cast<std::int64_t>(tuples);
  out.keys.resize(static_cast<std::size_t>(out.count));
  for_each_index(
      static_cast<std::size_t>(out.count),
      [&](std::size_t idx) {
        std::int64_t sum = 0, pw = 0;
        auto r = static_cast<std::int64_t>(idx);
        for (int k = 0; k < s; ++k) {
          const std::int64_t n = r % N + 1;
          r /= N;
          sum += n;
          pw += powd[static_cast<std::size_t>(n)];
        }
        out.keys[idx] = sum + span * pw;
      },
      exec);
  return out;
}

}  // namespace

std::int64_t vinogradov_count(int N, int s, int d, std::int64_t max_tuples, Exec exec) {
  TupleKeys tk = enumerate_keys(N, s, d, max_tuples, exec);
  std::sort(tk.keys.begin(), tk.keys.end());
  std::int64_t total = 0;
  for (std::size_t a = 0; a < tk.keys.size();) {
    std::size_t b = a;
    while (b < tk.keys.size() && tk.keys[b] == tk.keys[a]) ++b;
    const auto c = static_cast<std::int64_t>(b - a);
    total += c * c;
    a = b;
  }
  return total;
}

double weighted_count(const MeanValueProblem& prob, std::int64_t max_tuples) {
  prob.validate();
  TupleKeys tk = enumerate_keys(prob.N, prob.s, prob.d, max_tuples, Exec::serial);
  std::map<std::int64_t, cd> acc;
  for (std::int64_t idx = 0; idx < tk.count; ++idx) {
    cd w{1.0, 0.0};
    std::int64_t r = idx;
    for (int k = 0; k < prob.s; ++k) {
      const std::int64_t n = r % prob.N;
      r /= prob.N;
      if (!prob.coeffs.empty()) w *= prob.coeffs[static_cast<std::size_t>(n)];
    }
    acc[tk.keys[static_cast<std::size_t>(idx)]] += w;
  }
  double total = 0.0;
  for (const auto& [k, v] : acc) total += std::norm(v);
  return total;
}

double ExponentFit::predict(double scale) const { return std::exp(intercept + slope * std::log(scale)); }

ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw ValidationError("fit_exponent: need at least 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw ValidationError("fit_exponent: scales and values must be positive");
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(points.size());
  const double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-300) throw ValidationError("fit_exponent: all scales coincide");
  ExponentFit fit;
  fit.points = points;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  double r2 = 0.0;
  for (const auto& [x, y] : points) {
    const double e = std::log(y) - (fit.intercept + fit.slope * std::log(x));
    r2 += e * e;
  }
  fit.residual = std::sqrt(r2);
  return fit;
}

}  // namespace rlab
