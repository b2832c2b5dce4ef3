#pragma once

#include <cmath>
#include <vector>

namespace rlab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
/// Counter-clockwise quarter turn.
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 normalized(Vec2 a) { return a / norm(a); }

/// Acute angle in [0, pi/2] between the lines spanned by a and b.
double line_angle(Vec2 a, Vec2 b);

struct Box {
  Vec2 lo;
  Vec2 hi;

  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
  double area() const { return width() * height(); }
  Vec2 center() const { return (lo + hi) * 0.5; }
  bool contains(Vec2 p) const { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; }
  bool empty() const { return hi.x < lo.x || hi.y < lo.y; }
};

/// Vertices in counter-clockwise order.
using Polygon = std::vector<Vec2>;

double polygon_area(const Polygon& poly);
Polygon box_polygon(const Box& b);
/// Rectangle with the given centre; `axis` (unit) runs along the side of length `along`.
Polygon oriented_rectangle(Vec2 center, Vec2 axis, double along, double across);
Box bounding_box(const Polygon& poly);

/// Sutherland-Hodgman clip of `subject` against the convex polygon `clip`.
Polygon clip_convex(const Polygon& subject, const Polygon& clip);
double intersection_area(const Polygon& a, const Polygon& b);

bool contains_point(const Polygon& convex, Vec2 p, double tol = 0.0);
double distance_to_segment(Vec2 p, Vec2 a, Vec2 b);
/// Zero when p is inside the convex polygon.
double distance_to_convex(const Polygon& convex, Vec2 p);
/// Separating-axis test, closed sets.
bool convex_overlap(const Polygon& a, const Polygon& b);

}  // namespace rlab
