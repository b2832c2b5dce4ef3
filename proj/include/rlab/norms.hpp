#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "rlab/field.hpp"

namespace rlab {

struct Ball {
  Vec2 center;
  double radius = 1.0;
  bool contains(Vec2 p) const { return norm(p - center) <= radius; }
};

using Domain = std::variant<Ball, Box>;

bool domain_contains(const Domain& dom, Vec2 p);
Box domain_bounds(const Domain& dom);
double domain_area(const Domain& dom);

/// (sum over grid points x in dom of |f(x)|^p * cell area)^(1/p). The grid is
/// taken as one period; points are not replicated.
double lp_norm(const Field& f, double p, const Domain& dom, Exec exec = Exec::parallel);

/// p-th power of the above (no root), for integrals of |f|^p.
double lp_power(const Field& f, double p, const Domain& dom, Exec exec = Exec::parallel);

struct SampledNorm {
  double value = 0.0;       ///< the norm
  double power = 0.0;       ///< integral estimate of |f|^p
  double std_error = 0.0;   ///< standard error of `power`
  std::size_t samples = 0;  ///< points inside the domain
};

/// Stratified Monte Carlo estimate of ||f||_{L^p(dom)}: the domain's bounding
/// box is split into cells x cells strata with one seeded uniform point each.
SampledNorm lp_norm_sampled(const TiledField& f, double p, const Domain& dom, std::size_t cells, std::uint64_t seed,
                            Exec exec = Exec::parallel);

struct MeanValueProblem {
  int N = 1;
  int d = 3;
  int s = 1;
  std::vector<cd> coeffs;  ///< a_1..a_N; empty means all ones

  void validate() const;
};

/// s with p = 2s; odd or fractional p has no exact torus quadrature and is refused.
int mean_value_order(double p);

struct MeanValueOptions {
  int grid_factor_x1 = 1;  ///< multiply the minimal exact grid along x1
  int grid_factor_x2 = 1;
  double memory_budget_mb = 2048.0;
  Exec exec = Exec::parallel;
};

/// ||sum_n a_n e(n x1 + n^d x2)||_{L^{2s}(T^2)}^{2s}, exactly: |S|^{2s} is a
/// trigonometric polynomial of degree s(N-1) in x1 and s(N^d-1) in x2 (after
/// removing a unimodular factor), so the average over an M1 x M2 grid with
/// M1 > s(N-1), M2 > s(N^d-1) is its mean.
double exp_sum_lp_torus(const MeanValueProblem& prob, const MeanValueOptions& opt = {});

/// Grid used by exp_sum_lp_torus.
std::pair<std::size_t, std::size_t> exp_sum_grid(const MeanValueProblem& prob, const MeanValueOptions& opt = {});

/// #{(n, m) in {1..N}^{2s}: sum n_i = sum m_i, sum n_i^d = sum m_i^d} by
/// meet-in-the-middle over the s-fold (sum, power sum) keys.
std::int64_t vinogradov_count(int N, int s, int d, std::int64_t max_tuples = 200'000'000, Exec exec = Exec::parallel);

/// sum over keys of |sum_{s-tuples with that key} prod a_{n_i}|^2: the same
/// mean value for arbitrary coefficients.
double weighted_count(const MeanValueProblem& prob, std::int64_t max_tuples = 50'000'000);

struct ExponentFit {
  std::vector<std::pair<double, double>> points;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< root of the summed squared log residuals

  double predict(double scale) const;
};

ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& points);

}  // namespace rlab
