#pragma once

#include <random>
#include <vector>

#include "rlab/geometry.hpp"

namespace rlab {

/// Real bivariate polynomial of degree <= D. Coefficient of x^a y^b sits at
/// t(t+1)/2 + b with t = a + b.
class Polynomial2 {
 public:
  Polynomial2() : Polynomial2(0) {}
  explicit Polynomial2(int degree);
  Polynomial2(int degree, std::vector<double> coeffs);

  static std::size_t num_coeffs(int degree) { return static_cast<std::size_t>((degree + 1) * (degree + 2) / 2); }
  static std::size_t index(int a, int b) {
    const int t = a + b;
    return static_cast<std::size_t>(t * (t + 1) / 2 + b);
  }

  int degree() const { return degree_; }
  const std::vector<double>& coeffs() const { return c_; }
  std::vector<double>& coeffs() { return c_; }
  double coeff(int a, int b) const { return c_[index(a, b)]; }
  double& coeff(int a, int b) { return c_[index(a, b)]; }

  double operator()(Vec2 p) const;
  Vec2 gradient(Vec2 p) const;
  double value_and_gradient(Vec2 p, Vec2& grad) const;

  Polynomial2 operator*(const Polynomial2& o) const;
  Polynomial2 operator+(const Polynomial2& o) const;
  Polynomial2 operator*(double s) const;

  double coeff_norm() const;
  Polynomial2 normalized() const;
  bool is_zero() const;
  /// Degree of the highest nonzero monomial.
  int effective_degree() const;

  /// Independent standard normal coefficients, then normalized.
  static Polynomial2 random(int degree, std::mt19937_64& rng);
  /// a x + b y + c
  static Polynomial2 line(double a, double b, double c);
  /// (x - cx)^2 + (y - cy)^2 - r^2
  static Polynomial2 circle(Vec2 c, double r);

 private:
  int degree_ = 0;
  std::vector<double> c_;
};

/// Newton projection of q onto Z(P): returns false when it fails to converge
/// within `max_iter` steps or leaves the search radius.
bool project_to_zero_set(const Polynomial2& P, Vec2 q, Vec2& z, int max_iter = 20, double tol = 1e-12, double max_step = INFINITY);

}  // namespace rlab
