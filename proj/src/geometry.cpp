#include "rlab/geometry.hpp"

#include <algorithm>
#include <limits>

namespace rlab {

double line_angle(Vec2 a, Vec2 b) {
  const double c = std::abs(dot(a, b)) / (norm(a) * norm(b));
  const double s = std::abs(cross(a, b)) / (norm(a) * norm(b));
  return std::atan2(s, c);
}

double polygon_area(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * std::abs(s);
}

Polygon box_polygon(const Box& b) {
  return {b.lo, {b.hi.x, b.lo.y}, b.hi, {b.lo.x, b.hi.y}};
}

Polygon oriented_rectangle(Vec2 center, Vec2 axis, double along, double across) {
  const Vec2 a = axis * (0.5 * along);
  const Vec2 c = perp(axis) * (0.5 * across);
  return {center - a - c, center + a - c, center + a + c, center - a + c};
}

Box bounding_box(const Polygon& poly) {
  Box b{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
        {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
  for (Vec2 p : poly) {
    b.lo.x = std::min(b.lo.x, p.x);
    b.lo.y = std::min(b.lo.y, p.y);
    b.hi.x = std::max(b.hi.x, p.x);
    b.hi.y = std::max(b.hi.y, p.y);
  }
  return b;
}

namespace {

Polygon ccw(const Polygon& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += cross(p[i], p[(i + 1) % p.size()]);
  if (s >= 0.0) return p;
  return Polygon(p.rbegin(), p.rend());
}

}  // namespace

Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
  Polygon out = subject;
  const Polygon c = ccw(clip);
  const std::size_t m = c.size();
  for (std::size_t e = 0; e < m && !out.empty(); ++e) {
    const Vec2 a = c[e];
    const Vec2 b = c[(e + 1) % m];
    const Vec2 edge = b - a;
    Polygon in;
    in.swap(out);
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 p = in[i];
      const Vec2 q = in[(i + 1) % n];
      const double sp = cross(edge, p - a);
      const double sq = cross(edge, q - a);
      if (sp >= 0.0) out.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) {
        const double t = sp / (sp - sq);
        out.push_back(p + (q - p) * t);
      }
    }
  }
  return out;
}

double intersection_area(const Polygon& a, const Polygon& b) { return polygon_area(clip_convex(a, b)); }

bool contains_point(const Polygon& convex, Vec2 p, double tol) {
  const Polygon c = ccw(convex);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec2 a = c[i];
    const Vec2 e = c[(i + 1) % c.size()] - a;
    if (cross(e, p - a) < -tol * norm(e)) return false;
  }
  return true;
}

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

double distance_to_convex(const Polygon& convex, Vec2 p) {
  if (convex.empty()) return std::numeric_limits<double>::infinity();
  if (convex.size() >= 3 && contains_point(convex, p)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < convex.size(); ++i)
    d = std::min(d, distance_to_segment(p, convex[i], convex[(i + 1) % convex.size()]));
  return d;
}

bool convex_overlap(const Polygon& a, const Polygon& b) {
  auto separated = [](const Polygon& p, const Polygon& q) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      const Vec2 axis = perp(p[(i + 1) % p.size()] - p[i]);
      double pmin = std::numeric_limits<double>::infinity(), pmax = -pmin;
      double qmin = pmin, qmax = -pmin;
      for (Vec2 v : p) { pmin = std::min(pmin, dot(v, axis)); pmax = std::max(pmax, dot(v, axis)); }
      for (Vec2 v : q) { qmin = std::min(qmin, dot(v, axis)); qmax = std::max(qmax, dot(v, axis)); }
      if (pmax < qmin || qmax < pmin) return true;
    }
    return false;
  };
  return !separated(a, b) && !separated(b, a);
}

}  // namespace rlab
