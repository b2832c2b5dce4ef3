#include "rlab/polypart.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

#include "rlab/error.hpp"

namespace rlab {

MassDistribution MassDistribution::uniform_points(std::vector<Vec2> pts) {
  MassDistribution m;
  m.weights.assign(pts.size(), 1.0);
  m.points = std::move(pts);
  return m;
}

MassDistribution MassDistribution::from_density(const GridSpec& grid, const std::vector<double>& density) {
  if (density.size() != grid.size()) throw ValidationError("density does not match grid");
  MassDistribution m;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (density[k] < 0.0) throw ValidationError("mass density must be nonnegative");
    if (density[k] == 0.0) continue;
    m.points.push_back(grid.center(k));
    m.weights.push_back(density[k] * grid.pixel_area());
  }
  return m;
}

MassDistribution MassDistribution::from_field(const Field& f) {
  MassDistribution m;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double w = std::norm(f.data[k]) * f.cell_area();
    if (w == 0.0) continue;
    m.points.push_back(f.position(k));
    m.weights.push_back(w);
  }
  return m;
}

double MassDistribution::total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

void MassDistribution::validate() const {
  if (points.size() != weights.size()) throw ValidationError("mass: points and weights differ in length");
  for (double w : weights)
    if (!(w >= 0.0)) throw ValidationError("mass weights must be nonnegative");
  if (!(total() > 0.0)) throw ValidationError("mass must have positive total");
}

double signed_imbalance(const Polynomial2& P, const MassDistribution& m) {
  double s = 0.0, tot = 0.0;
  for (std::size_t j = 0; j < m.points.size(); ++j) {
    const double v = P(m.points[j]);
    tot += m.weights[j];
    if (v > 0.0) s += m.weights[j];
    else if (v < 0.0) s -= m.weights[j];
  }
  return tot > 0.0 ? s / tot : 0.0;
}

int min_bisect_degree(std::size_t masses) {
  int k = 1;
  while (static_cast<std::size_t>((k + 1) * (k + 2) / 2 - 1) < masses) ++k;
  return k;
}

Polynomial2 affine_substitute(const Polynomial2& Q, Vec2 c, double s) {
  const int D = Q.degree();
  const Polynomial2 X = Polynomial2::line(1.0 / s, 0.0, -c.x / s);
  const Polynomial2 Y = Polynomial2::line(0.0, 1.0 / s, -c.y / s);
  std::vector<Polynomial2> xp{Polynomial2(0, {1.0})}, yp{Polynomial2(0, {1.0})};
  for (int k = 1; k <= D; ++k) {
    xp.push_back(xp.back() * X);
    yp.push_back(yp.back() * Y);
  }
  Polynomial2 out(D);
  for (int t = 0; t <= D; ++t)
    for (int b = 0; b <= t; ++b) {
      const double q = Q.coeff(t - b, b);
      if (q == 0.0) continue;
      const Polynomial2 term = xp[static_cast<std::size_t>(t - b)] * yp[static_cast<std::size_t>(b)];
      for (int tt = 0; tt <= t; ++tt)
        for (int bb = 0; bb <= tt; ++bb) out.coeff(tt - bb, bb) += q * term.coeff(tt - bb, bb);
    }
  return out;
}

namespace {

// Masses in normalised coordinates with precomputed monomial features.
struct Problem {
  int degree = 1;
  std::size_t ncoef = 3;
  std::vector<std::vector<double>> phi;  // per mass: npts * ncoef, row-major
  std::vector<std::vector<double>> w;    // per mass weights / total
};

Problem build_problem(const std::vector<MassDistribution>& masses, int degree, Vec2 c, double s) {
  Problem pr;
  pr.degree = degree;
  pr.ncoef = Polynomial2::num_coeffs(degree);
  for (const auto& m : masses) {
    const double tot = m.total();
    std::vector<double> phi(m.points.size() * pr.ncoef), w(m.points.size());
    for (std::size_t j = 0; j < m.points.size(); ++j) {
      const Vec2 p = (m.points[j] - c) / s;
      std::size_t k = 0;
      for (int t = 0; t <= degree; ++t)
        for (int b = 0; b <= t; ++b) phi[j * pr.ncoef + k++] = std::pow(p.x, t - b) * std::pow(p.y, b);
      w[j] = m.weights[j] / tot;
    }
    pr.phi.push_back(std::move(phi));
    pr.w.push_back(std::move(w));
  }
  return pr;
}

inline double poly_at(const Problem& pr, std::size_t i, std::size_t j, const std::vector<double>& c) {
  const double* f = pr.phi[i].data() + j * pr.ncoef;
  double v = 0.0;
  for (std::size_t k = 0; k < pr.ncoef; ++k) v += f[k] * c[k];
  return v;
}

std::vector<double> hard_imbalance(const Problem& pr, const std::vector<double>& c) {
  std::vector<double> g(pr.phi.size());
  for (std::size_t i = 0; i < pr.phi.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < pr.w[i].size(); ++j) {
      const double v = poly_at(pr, i, j, c);
      if (v > 0.0) s += pr.w[i][j];
      else if (v < 0.0) s -= pr.w[i][j];
    }
    g[i] = s;
  }
  return g;
}

double max_abs(const std::vector<double>& g) {
  double m = 0.0;
  for (double v : g) m = std::max(m, std::abs(v));
  return m;
}

void normalize(std::vector<double>& c) {
  double n = 0.0;
  for (double v : c) n += v * v;
  n = std::sqrt(n);
  for (double& v : c) v /= n;
}

// Solve the small SPD system A y = r in place (Cholesky); returns false if not SPD.
bool cholesky_solve(std::vector<double>& A, std::vector<double>& r, std::size_t m) {
  for (std::size_t j = 0; j < m; ++j) {
    double d = A[j * m + j];
    for (std::size_t k = 0; k < j; ++k) d -= A[j * m + k] * A[j * m + k];
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    A[j * m + j] = d;
    for (std::size_t i = j + 1; i < m; ++i) {
      double s = A[i * m + j];
      for (std::size_t k = 0; k < j; ++k) s -= A[i * m + k] * A[j * m + k];
      A[i * m + j] = s / d;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    double s = r[i];
    for (std::size_t k = 0; k < i; ++k) s -= A[i * m + k] * r[k];
    r[i] = s / A[i * m + i];
  }
  for (std::size_t ii = m; ii-- > 0;) {
    double s = r[ii];
    for (std::size_t k = ii + 1; k < m; ++k) s -= A[k * m + ii] * r[k];
    r[ii] = s / A[ii * m + ii];
  }
  return true;
}

// Median of |P| over all points, the soft-sign temperature unit.
double median_abs(const Problem& pr, const std::vector<double>& c) {
  std::vector<double> a;
  for (std::size_t i = 0; i < pr.phi.size(); ++i)
    for (std::size_t j = 0; j < pr.w[i].size(); ++j) a.push_back(std::abs(poly_at(pr, i, j, c)));
  if (a.empty()) return 1.0;
  std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(a.size() / 2), a.end());
  return std::max(a[a.size() / 2], 1e-300);
}

// Levenberg-Marquardt on r_i(c) = sum_j w_ij tanh(P_c(x_ij) / tau) with tau
// annealed down; c is renormalised onto the unit sphere after every step.
void soft_descent(const Problem& pr, std::vector<double>& c) {
  const std::size_t m = pr.phi.size(), n = pr.ncoef;
  std::vector<double> r(m), J(m * n), A(m * m), y(m);
  for (double alpha : {1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001}) {
    const double tau = alpha * median_abs(pr, c);
    auto residuals = [&](const std::vector<double>& cc, std::vector<double>& rr, std::vector<double>* JJ) {
      if (JJ) std::fill(JJ->begin(), JJ->end(), 0.0);
      double ss = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < pr.w[i].size(); ++j) {
          const double v = poly_at(pr, i, j, cc) / tau;
          const double th = std::tanh(v);
          s += pr.w[i][j] * th;
          if (JJ) {
            const double dv = pr.w[i][j] * (1.0 - th * th) / tau;
            if (dv == 0.0) continue;
            const double* f = pr.phi[i].data() + j * n;
            for (std::size_t k = 0; k < n; ++k) (*JJ)[i * n + k] += dv * f[k];
          }
        }
        rr[i] = s;
        ss += s * s;
      }
      return ss;
    };
    double cost = residuals(c, r, &J);
    double lambda = 1e-3;
    for (int it = 0; it < 40 && cost > 1e-14; ++it) {
      // Minimum-norm step: delta = -J^T (J J^T + lambda diag)^{-1} r.
      bool improved = false;
      for (int tries = 0; tries < 8 && !improved; ++tries) {
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t b = 0; b < m; ++b) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += J[a * n + k] * J[b * n + k];
            A[a * m + b] = s;
          }
        double trace = 0.0;
        for (std::size_t a = 0; a < m; ++a) trace += A[a * m + a];
        for (std::size_t a = 0; a < m; ++a) A[a * m + a] += lambda * (trace / static_cast<double>(m) + 1e-300);
        y = r;
        if (!cholesky_solve(A, y, m)) {
          lambda *= 10.0;
          continue;
        }
        std::vector<double> trial = c;
        for (std::size_t k = 0; k < n; ++k) {
          double s = 0.0;
          for (std::size_t a = 0; a < m; ++a) s += J[a * n + k] * y[a];
          trial[k] -= s;
        }
        normalize(trial);
        std::vector<double> rt(m);
        const double ct = residuals(trial, rt, nullptr);
        if (ct < cost) {
          c = trial;
          cost = residuals(c, r, &J);
          lambda = std::max(lambda * 0.3, 1e-9);
          improved = true;
        } else {
          lambda *= 10.0;
        }
      }
      if (!improved) break;
    }
  }
}

// Nelder-Mead on the hard objective max_i |imbalance_i|, restricted to the sphere by normalisation.
void nelder_mead(const Problem& pr, std::vector<double>& c, int max_evals, double step) {
  const std::size_t n = pr.ncoef;
  auto f = [&](std::vector<double> x) {
    normalize(x);
    return max_abs(hard_imbalance(pr, x));
  };
  std::vector<std::vector<double>> S(n + 1, c);
  for (std::size_t k = 0; k < n; ++k) S[k + 1][k] += step;
  std::vector<double> F(n + 1);
  for (std::size_t k = 0; k <= n; ++k) F[k] = f(S[k]);
  int evals = static_cast<int>(n + 1);
  while (evals < max_evals) {
    std::vector<std::size_t> order(n + 1);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return F[a] < F[b]; });
    std::vector<std::vector<double>> S2;
    std::vector<double> F2;
    for (std::size_t k : order) {
      S2.push_back(S[k]);
      F2.push_back(F[k]);
    }
    S = std::move(S2);
    F = std::move(F2);
    if (F[0] == 0.0) break;
    std::vector<double> cen(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t d = 0; d < n; ++d) cen[d] += S[k][d] / static_cast<double>(n);
    auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t d = 0; d < n; ++d) x[d] = cen[d] + t * (S[n][d] - cen[d]);
      return x;
    };
    const auto xr = along(-1.0);
    const double fr = f(xr);
    ++evals;
    if (fr < F[0]) {
      const auto xe = along(-2.0);
      const double fe = f(xe);
      ++evals;
      if (fe < fr) S[n] = xe, F[n] = fe;
      else S[n] = xr, F[n] = fr;
    } else if (fr < F[n - 1]) {
      S[n] = xr;
      F[n] = fr;
    } else {
      const auto xc = along(0.5);
      const double fc = f(xc);
      ++evals;
      if (fc < F[n]) {
        S[n] = xc;
        F[n] = fc;
      } else {
        for (std::size_t k = 1; k <= n; ++k) {
          for (std::size_t d = 0; d < n; ++d) S[k][d] = S[0][d] + 0.5 * (S[k][d] - S[0][d]);
          F[k] = f(S[k]);
          ++evals;
        }
      }
    }
  }
  std::size_t best = static_cast<std::size_t>(std::min_element(F.begin(), F.end()) - F.begin());
  c = S[best];
  normalize(c);
}

// One mass: the signed imbalance is odd on the sphere, so it changes sign on
// the half great circle from c0 to -c0; bisect for the jump.
void antipodal_arc(const Problem& pr, std::vector<double>& c0, std::mt19937_64& rng) {
  const std::size_t n = pr.ncoef;
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> u(n);
  for (double& v : u) v = g(rng);
  double d = 0.0;
  for (std::size_t k = 0; k < n; ++k) d += u[k] * c0[k];
  for (std::size_t k = 0; k < n; ++k) u[k] -= d * c0[k];
  normalize(u);
  auto at = [&](double th) {
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = std::cos(th) * c0[k] + std::sin(th) * u[k];
    return x;
  };
  double lo = 0.0, hi = M_PI;
  const double g0 = hard_imbalance(pr, at(lo))[0];
  if (g0 == 0.0) return;
  std::vector<double> best = at(lo);
  double best_v = std::abs(g0);
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const auto x = at(mid);
    const double gm = hard_imbalance(pr, x)[0];
    if (std::abs(gm) < best_v) {
      best_v = std::abs(gm);
      best = x;
    }
    if (gm == 0.0) break;
    if ((gm > 0.0) == (g0 > 0.0)) lo = mid;
    else hi = mid;
  }
  c0 = best;
}

}  // namespace

BisectResult bisect(const std::vector<MassDistribution>& masses, int degree, std::uint64_t seed, const BisectOptions& opt) {
  if (masses.empty()) throw ValidationError("bisect: no masses");
  for (const auto& m : masses) m.validate();
  if (degree < 1) throw ValidationError("bisect: degree must be >= 1");
  if (static_cast<std::size_t>((degree + 1) * (degree + 2) / 2 - 1) < masses.size())
    throw ValidationError("bisect: degree " + std::to_string(degree) + " cannot bisect " + std::to_string(masses.size()) + " masses");
  Box bb{{INFINITY, INFINITY}, {-INFINITY, -INFINITY}};
  for (const auto& m : masses)
    for (Vec2 p : m.points) {
      bb.lo = {std::min(bb.lo.x, p.x), std::min(bb.lo.y, p.y)};
      bb.hi = {std::max(bb.hi.x, p.x), std::max(bb.hi.y, p.y)};
    }
  const Vec2 c = bb.center();
  const double s = std::max({0.5 * bb.width(), 0.5 * bb.height(), 1e-12});
  const Problem pr = build_problem(masses, degree, c, s);

  struct Attempt {
    std::vector<double> coef;
    double imbalance = INFINITY;
  };
  auto run = [&](std::uint64_t start) {
    std::seed_seq sq{seed, start, std::uint64_t{0xb15ec7}};
    std::mt19937_64 rng(sq);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> x(pr.ncoef);
    for (double& v : x) v = g(rng);
    normalize(x);
    if (masses.size() == 1) {
      antipodal_arc(pr, x, rng);
    } else {
      soft_descent(pr, x);
      if (max_abs(hard_imbalance(pr, x)) > opt.tolerance) nelder_mead(pr, x, 600, 0.02);
    }
    return Attempt{x, max_abs(hard_imbalance(pr, x))};
  };

  Attempt best;
  std::uint64_t best_start = 0;
  const int batch = std::max(1, opt.batch);
  for (int base = 0; base < opt.max_restarts; base += batch) {
    const int count = std::min(batch, opt.max_restarts - base);
    std::vector<Attempt> res(static_cast<std::size_t>(count));
    for_each_index(
        static_cast<std::size_t>(count), [&](std::size_t k) { res[k] = run(static_cast<std::uint64_t>(base) + k); }, opt.exec);
    for (int k = 0; k < count; ++k)
      if (res[static_cast<std::size_t>(k)].imbalance < best.imbalance) {
        best = res[static_cast<std::size_t>(k)];
        best_start = static_cast<std::uint64_t>(base + k);
      }
    if (best.imbalance <= opt.tolerance) break;
  }
  if (best.imbalance > opt.tolerance)
    throw BisectError("bisect: best imbalance " + std::to_string(best.imbalance) + " exceeds tolerance " +
                          std::to_string(opt.tolerance) + " after " + std::to_string(opt.max_restarts) + " restarts",
                      best.imbalance);
  BisectResult out;
  out.poly = affine_substitute(Polynomial2(degree, best.coef), c, s).normalized();
  out.start = best_start;
  for (const auto& m : masses) out.per_mass.push_back(signed_imbalance(out.poly, m));
  out.imbalance = 0.0;
  for (double v : out.per_mass) out.imbalance = std::max(out.imbalance, std::abs(v));
  // Points found exactly on the zero set in normalised coordinates may not stay there.
  if (out.imbalance > opt.tolerance)
    throw BisectError("bisect: imbalance " + std::to_string(out.imbalance) + " after mapping back to input coordinates",
                      out.imbalance);
  return out;
}

std::uint32_t Partition::code_of(Vec2 p, bool& on_zero) const {
  std::uint32_t code = 0;
  on_zero = false;
  for (std::size_t k = 0; k < factors.size(); ++k) {
    const double v = factors[k](p);
    if (v == 0.0) on_zero = true;
    if (v > 0.0) code |= (1u << k);
  }
  return code;
}

int Partition::cell_of(Vec2 p) const {
  bool zero = false;
  const std::uint32_t code = code_of(p, zero);
  if (zero) return -1;
  const auto it = std::lower_bound(cell_code.begin(), cell_code.end(), code);
  if (it == cell_code.end() || *it != code) return -2;
  return static_cast<int>(it - cell_code.begin());
}

namespace {

// Fills labels, components, masses, distance map from the factors.
void finish_partition(Partition& part, const MassDistribution* mass, Exec exec) {
  const GridSpec& g = part.grid;
  const std::size_t n = g.size();
  std::vector<std::vector<double>> vals;
  for (const auto& f : part.factors) vals.push_back(sample_on_grid(f, g, exec));
  std::vector<std::uint32_t> code(n, 0);
  std::vector<std::uint8_t> zero(n, 0);
  for (std::size_t k = 0; k < part.factors.size(); ++k)
    for (std::size_t p = 0; p < n; ++p) {
      if (vals[k][p] == 0.0) zero[p] = 1;
      if (vals[k][p] > 0.0) code[p] |= (1u << k);
    }
  std::vector<std::uint32_t> codes;
  for (std::size_t p = 0; p < n; ++p)
    if (!zero[p]) codes.push_back(code[p]);
  std::vector<std::uint32_t> point_codes;
  std::vector<std::uint8_t> point_zero;
  if (mass) {
    for (Vec2 x : mass->points) {
      bool z = false;
      std::uint32_t c = 0;
      for (std::size_t k = 0; k < part.factors.size(); ++k) {
        const double v = part.factors[k](x);
        if (v == 0.0) z = true;
        if (v > 0.0) c |= (1u << k);
      }
      point_codes.push_back(c);
      point_zero.push_back(z ? 1 : 0);
      if (!z) codes.push_back(c);
    }
  }
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
  part.cell_code = codes;
  auto label_of = [&](std::uint32_t c) {
    return static_cast<int>(std::lower_bound(codes.begin(), codes.end(), c) - codes.begin());
  };
  part.label.assign(n, -1);
  std::vector<int> pixels(codes.size(), 0);
  for (std::size_t p = 0; p < n; ++p)
    if (!zero[p]) {
      part.label[p] = label_of(code[p]);
      ++pixels[static_cast<std::size_t>(part.label[p])];
    }
  part.masses.assign(codes.size(), 0.0);
  part.wall_mass = 0.0;
  part.point_cell.clear();
  if (mass) {
    for (std::size_t j = 0; j < mass->points.size(); ++j) {
      if (point_zero[j]) {
        part.point_cell.push_back(-1);
        part.wall_mass += mass->weights[j];
        continue;
      }
      const int l = label_of(point_codes[j]);
      part.point_cell.push_back(l);
      part.masses[static_cast<std::size_t>(l)] += mass->weights[j];
    }
  }
  part.thin_cells = 0;
  for (std::size_t l = 0; l < codes.size(); ++l)
    if (pixels[l] < 4 && part.masses[l] > 0.0) ++part.thin_cells;

  part.component.assign(n, -1);
  int comp = 0;
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < n; ++s) {
    if (part.label[s] < 0 || part.component[s] >= 0) continue;
    part.component[s] = comp;
    queue.push_back(s);
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      const std::size_t i = p % g.nx, j = p / g.nx;
      const std::size_t nb[4] = {i > 0 ? p - 1 : p, i + 1 < g.nx ? p + 1 : p, j > 0 ? p - g.nx : p, j + 1 < g.ny ? p + g.nx : p};
      for (std::size_t q : nb)
        if (q != p && part.component[q] < 0 && part.label[q] == part.label[p]) {
          part.component[q] = comp;
          queue.push_back(q);
        }
    }
    ++comp;
  }
  part.num_components = comp;

  std::vector<const std::vector<double>*> ptrs;
  for (const auto& v : vals) ptrs.push_back(&v);
  part.distance = distance_to_crossings(g, ptrs);
  part.polynomial = Polynomial2(0, {1.0});
  for (const auto& f : part.factors) part.polynomial = part.polynomial * f;
}

// Smallest |grad| at interpolated zero crossings relative to the largest |grad| on the grid.
double crossing_gradient_ratio(const Polynomial2& P, const GridSpec& g, Exec exec) {
  const std::vector<double> v = sample_on_grid(P, g, exec);
  const CrossingSet cs = zero_crossings(g, v);
  double gmax = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) gmax = std::max(gmax, norm(P.gradient(g.center(k))));
  if (gmax == 0.0) return 0.0;
  double gmin = INFINITY;
  for (Vec2 z : cs.points) gmin = std::min(gmin, norm(P.gradient(z)));
  return cs.points.empty() ? INFINITY : gmin / gmax;
}

GridSpec square_grid(const Box& domain, std::size_t n) {
  GridSpec g{domain, n, n};
  g.validate();
  return g;
}

}  // namespace

Partition partition(const MassDistribution& mass, int D, const Box& domain, std::uint64_t seed, const PartitionOptions& opt) {
  if (D < 1) throw ValidationError("partition: degree D must be >= 1");
  mass.validate();
  Partition part;
  part.grid = square_grid(domain, opt.grid_n);

  std::vector<std::vector<std::size_t>> parts(1);
  for (std::size_t j = 0; j < mass.points.size(); ++j)
    if (mass.weights[j] > 0.0) parts[0].push_back(j);
  int used = 0;
  for (int level = 0;; ++level) {
    const int k = min_bisect_degree(parts.size());
    if (used + k > D) break;
    std::vector<MassDistribution> ms;
    for (const auto& idx : parts) {
      MassDistribution m;
      for (std::size_t j : idx) {
        m.points.push_back(mass.points[j]);
        m.weights.push_back(mass.weights[j]);
      }
      ms.push_back(std::move(m));
    }
    const BisectResult br = bisect(ms, k, seed * 1000003ULL + static_cast<std::uint64_t>(level), opt.bisect);
    part.factors.push_back(br.poly);
    used += k;
    std::vector<std::vector<std::size_t>> next;
    for (const auto& idx : parts) {
      std::vector<std::size_t> pos, neg;
      for (std::size_t j : idx) {
        const double v = br.poly(mass.points[j]);
        if (v > 0.0) pos.push_back(j);
        else if (v < 0.0) neg.push_back(j);
      }
      if (!pos.empty()) next.push_back(std::move(pos));
      if (!neg.empty()) next.push_back(std::move(neg));
    }
    parts = std::move(next);
    if (parts.empty() || part.factors.size() >= 31) break;
  }
  if (part.factors.empty()) throw ValidationError("partition: degree budget admits no bisection");

  // Generic perturbation so every factor's detected zero crossings are non-singular.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Polynomial2> noise;
  for (const auto& f : part.factors) noise.push_back(Polynomial2::random(f.degree(), rng));
  double eps = opt.eps_start;
  std::vector<Polynomial2> perturbed;
  bool ok = false;
  for (int dbl = 0; dbl <= opt.max_doublings && !ok; ++dbl, eps *= 2.0) {
    perturbed.clear();
    ok = true;
    for (std::size_t k = 0; k < part.factors.size(); ++k) {
      perturbed.push_back((part.factors[k] + noise[k] * eps).normalized());
      if (crossing_gradient_ratio(perturbed.back(), part.grid, opt.bisect.exec) < opt.singular_rel) ok = false;
    }
    part.perturbation = eps;
  }
  if (!ok) throw ValidationError("partition: could not make the factors non-singular on the grid");
  part.factors = perturbed;
  finish_partition(part, &mass, opt.bisect.exec);
  return part;
}

Partition partition_of(const Polynomial2& P, const Box& domain, std::size_t grid_n) {
  if (P.is_zero()) throw ValidationError("partition_of: zero polynomial");
  Partition part;
  part.grid = square_grid(domain, grid_n);
  part.factors = {P};
  finish_partition(part, nullptr, Exec::parallel);
  return part;
}

std::vector<std::uint8_t> wall(const Partition& part, double rho) {
  if (!(rho > 0.0)) throw ValidationError("wall: rho must be positive");
  std::vector<std::uint8_t> m(part.grid.size(), 0);
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = (part.distance.touches[k] || part.distance.dist[k] <= rho) ? 1 : 0;
  return m;
}

double mask_area(const GridSpec& grid, const std::vector<std::uint8_t>& mask) {
  std::size_t c = 0;
  for (auto v : mask) c += v;
  return static_cast<double>(c) * grid.pixel_area();
}

int segment_cell_incidence(const Partition& part, Vec2 a, Vec2 b) {
  const double step = 0.25 * std::min(part.grid.hx(), part.grid.hy());
  const double len = norm(b - a);
  const auto n = static_cast<std::size_t>(std::ceil(len / step)) + 1;
  std::vector<std::uint32_t> seen;
  for (std::size_t k = 0; k <= n; ++k) {
    const Vec2 p = a + (b - a) * (static_cast<double>(k) / static_cast<double>(n));
    if (!part.grid.domain.contains(p)) continue;
    bool zero = false;
    const std::uint32_t code = part.code_of(p, zero);
    if (zero) continue;
    if (std::find(seen.begin(), seen.end(), code) == seen.end()) seen.push_back(code);
  }
  return static_cast<int>(seen.size());
}

int tube_cell_incidence(const Partition& part, const Tube& tube) {
  const Vec2 h = tube.dir * (0.5 * tube.length);
  return segment_cell_incidence(part, tube.center - h, tube.center + h);
}

}  // namespace rlab
