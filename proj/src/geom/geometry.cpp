#include "ferry/geom/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace ferry::geom {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Polygon& poly) {
  double s = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    s += cross2(a, b);
  }
  return 0.5 * s;
}

bool point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a, ap = p - a;
  if (std::abs(cross2(ab, ap)) > kGeomTol * (1.0 + ab.norm())) return false;
  const double t = ab.squaredNorm() > 0 ? ap.dot(ab) / ab.squaredNorm() : 0.0;
  return t >= -kGeomTol && t <= 1.0 + kGeomTol;
}

bool point_in_polygon(const Vec2& p, const Polygon& poly) {
  // boundary counts as inside
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i)
    if (point_on_segment(p, poly[i], poly[(i + 1) % n])) return true;
  bool inside = false;
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x =
          a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

namespace {
int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross2(b - a, c - a);
  if (v > kGeomTol) return 1;
  if (v < -kGeomTol) return -1;
  return 0;
}
}  // namespace

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c,
                        const Vec2& d) {
  const int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && point_on_segment(c, a, b)) return true;
  if (o2 == 0 && point_on_segment(d, a, b)) return true;
  if (o3 == 0 && point_on_segment(a, c, d)) return true;
  if (o4 == 0 && point_on_segment(b, c, d)) return true;
  return false;
}

bool segment_intersects_polygon(const Vec2& a, const Vec2& b,
                                const Polygon& poly) {
  const size_t n = poly.size();
  // proper edge crossings
  for (size_t i = 0; i < n; ++i) {
    const Vec2& c = poly[i];
    const Vec2& d = poly[(i + 1) % n];
    const int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
    const int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
    if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0)
      return true;
  }
  // interior containment / grazing: sample interior points of ab
  for (double t : {0.5, 0.25, 0.75, 0.125, 0.875}) {
    const Vec2 p = a + t * (b - a);
    bool on_boundary = false;
    for (size_t i = 0; i < n && !on_boundary; ++i)
      on_boundary = point_on_segment(p, poly[i], poly[(i + 1) % n]);
    if (!on_boundary && point_in_polygon(p, poly)) return true;
  }
  return false;
}

double heading_change(const Vec2& u, const Vec2& v) {
  if (u.norm() < kGeomTol || v.norm() < kGeomTol)
    throw std::invalid_argument("heading_change: zero vector");
  const double ang = std::atan2(cross2(u, v), u.dot(v));
  return wrap_angle(ang);
}

double wrap_angle(double theta) {
  while (theta > M_PI) theta -= 2.0 * M_PI;
  while (theta <= -M_PI) theta += 2.0 * M_PI;
  return theta;
}

}  // namespace ferry::geom
