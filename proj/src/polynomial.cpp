#include "rlab/polynomial.hpp"

#include <algorithm>

#include "rlab/error.hpp"

namespace rlab {

Polynomial2::Polynomial2(int degree) : degree_(degree) {
  if (degree < 0) throw ValidationError("polynomial degree must be >= 0");
  c_.assign(num_coeffs(degree), 0.0);
}

Polynomial2::Polynomial2(int degree, std::vector<double> coeffs) : degree_(degree), c_(std::move(coeffs)) {
  if (degree < 0) throw ValidationError("polynomial degree must be >= 0");
  if (c_.size() != num_coeffs(degree))
    throw ValidationError("degree " + std::to_string(degree) + " polynomial needs " + std::to_string(num_coeffs(degree)) +
                          " coefficients, got " + std::to_string(c_.size()));
}

namespace {

// pw[k] = v^k for k = 0..D
inline void powers(double v, int D, double* pw) {
  pw[0] = 1.0;
  for (int k = 1; k <= D; ++k) pw[k] = pw[k - 1] * v;
}

constexpr int kMaxStackDegree = 63;

}  // namespace

double Polynomial2::operator()(Vec2 p) const {
  double px[kMaxStackDegree + 1], py[kMaxStackDegree + 1];
  if (degree_ > kMaxStackDegree) throw ValidationError("polynomial degree too large");
  powers(p.x, degree_, px);
  powers(p.y, degree_, py);
  double s = 0.0;
  std::size_t k = 0;
  for (int t = 0; t <= degree_; ++t)
    for (int b = 0; b <= t; ++b) s += c_[k++] * px[t - b] * py[b];
  return s;
}

double Polynomial2::value_and_gradient(Vec2 p, Vec2& grad) const {
  double px[kMaxStackDegree + 1], py[kMaxStackDegree + 1];
  if (degree_ > kMaxStackDegree) throw ValidationError("polynomial degree too large");
  powers(p.x, degree_, px);
  powers(p.y, degree_, py);
  double s = 0.0, gx = 0.0, gy = 0.0;
  std::size_t k = 0;
  for (int t = 0; t <= degree_; ++t)
    for (int b = 0; b <= t; ++b, ++k) {
      const int a = t - b;
      const double c = c_[k];
      if (c == 0.0) continue;
      s += c * px[a] * py[b];
      if (a > 0) gx += c * a * px[a - 1] * py[b];
      if (b > 0) gy += c * b * px[a] * py[b - 1];
    }
  grad = {gx, gy};
  return s;
}

Vec2 Polynomial2::gradient(Vec2 p) const {
  Vec2 g;
  value_and_gradient(p, g);
  return g;
}

Polynomial2 Polynomial2::operator*(const Polynomial2& o) const {
  Polynomial2 r(degree_ + o.degree_);
  for (int t1 = 0; t1 <= degree_; ++t1)
    for (int b1 = 0; b1 <= t1; ++b1) {
      const double c1 = coeff(t1 - b1, b1);
      if (c1 == 0.0) continue;
      for (int t2 = 0; t2 <= o.degree_; ++t2)
        for (int b2 = 0; b2 <= t2; ++b2) r.coeff(t1 - b1 + t2 - b2, b1 + b2) += c1 * o.coeff(t2 - b2, b2);
    }
  return r;
}

Polynomial2 Polynomial2::operator+(const Polynomial2& o) const {
  Polynomial2 r(std::max(degree_, o.degree_));
  for (std::size_t k = 0; k < c_.size(); ++k) r.c_[k] += c_[k];
  for (std::size_t k = 0; k < o.c_.size(); ++k) r.c_[k] += o.c_[k];
  return r;
}

Polynomial2 Polynomial2::operator*(double s) const {
  Polynomial2 r = *this;
  for (double& v : r.c_) v *= s;
  return r;
}

double Polynomial2::coeff_norm() const {
  double s = 0.0;
  for (double v : c_) s += v * v;
  return std::sqrt(s);
}

Polynomial2 Polynomial2::normalized() const {
  const double n = coeff_norm();
  if (n == 0.0) throw ValidationError("cannot normalize the zero polynomial");
  return *this * (1.0 / n);
}

bool Polynomial2::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](double v) { return v == 0.0; });
}

int Polynomial2::effective_degree() const {
  for (int t = degree_; t >= 0; --t)
    for (int b = 0; b <= t; ++b)
      if (coeff(t - b, b) != 0.0) return t;
  return -1;
}

Polynomial2 Polynomial2::random(int degree, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Polynomial2 p(degree);
  for (double& v : p.c_) v = g(rng);
  return p.normalized();
}

Polynomial2 Polynomial2::line(double a, double b, double c) {
  return Polynomial2(1, {c, a, b});
}

Polynomial2 Polynomial2::circle(Vec2 c, double r) {
  Polynomial2 p(2);
  p.coeff(0, 0) = c.x * c.x + c.y * c.y - r * r;
  p.coeff(1, 0) = -2.0 * c.x;
  p.coeff(0, 1) = -2.0 * c.y;
  p.coeff(2, 0) = 1.0;
  p.coeff(0, 2) = 1.0;
  return p;
}

bool project_to_zero_set(const Polynomial2& P, Vec2 q, Vec2& z, int max_iter, double tol, double max_step) {
  // Orthogonal projection by repeated linearisation at the current foot point:
  // x <- q - ((P(x) + grad P(x).(q - x)) / |grad P(x)|^2) grad P(x).
  Vec2 x = q;
  for (int it = 0; it < max_iter; ++it) {
    Vec2 g;
    const double v = P.value_and_gradient(x, g);
    const double g2 = dot(g, g);
    if (g2 == 0.0) return false;
    const Vec2 next = q - g * ((v + dot(g, q - x)) / g2);
    const double moved = norm(next - x);
    x = next;
    if (!(norm(x - q) <= max_step)) return false;
    if (moved <= tol * (1.0 + norm(x))) {
      Vec2 gz;
      const double vz = P.value_and_gradient(x, gz);
      if (std::abs(vz) > 1e-8 * (norm(gz) + 1e-300) * (1.0 + norm(x))) return false;
      z = x;
      return true;
    }
  }
  return false;
}

}  // namespace rlab
