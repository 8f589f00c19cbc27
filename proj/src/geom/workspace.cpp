#include "ferry/geom/workspace.hpp"

#include <cmath>

namespace ferry::geom {

namespace {

bool polygon_self_intersects(const Polygon& poly) {
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      // skip adjacent edges (they share an endpoint)
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j],
                             poly[(j + 1) % n]))
        return true;
    }
  }
  return false;
}

bool polygons_overlap(const Polygon& a, const Polygon& b) {
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      if (segments_intersect(a[i], a[(i + 1) % a.size()], b[j],
                             b[(j + 1) % b.size()]))
        return true;
  for (const Vec2& p : a)
    if (point_in_polygon(p, b)) return true;
  for (const Vec2& p : b)
    if (point_in_polygon(p, a)) return true;
  return false;
}

}  // namespace

void Workspace::validate() const {
  if (boundary.size() < 3) throw WorkspaceError("boundary needs >= 3 vertices");
  if (std::abs(signed_area(boundary)) < 1e-6)
    throw WorkspaceError("degenerate boundary polygon");
  if (signed_area(boundary) < 0)
    throw WorkspaceError("boundary must be counterclockwise");
  if (polygon_self_intersects(boundary))
    throw WorkspaceError("boundary polygon self-intersects");
  for (size_t k = 0; k < obstacles.size(); ++k) {
    const Polygon& o = obstacles[k];
    const std::string tag = "obstacle " + std::to_string(k);
    if (o.size() < 3) throw WorkspaceError(tag + " needs >= 3 vertices");
    if (std::abs(signed_area(o)) < 1e-6)
      throw WorkspaceError(tag + " is degenerate");
    if (polygon_self_intersects(o))
      throw WorkspaceError(tag + " self-intersects");
    for (const Vec2& p : o)
      if (!point_in_polygon(p, boundary))
        throw WorkspaceError(tag + " not inside the boundary");
    for (size_t j = 0; j < k; ++j)
      if (polygons_overlap(o, obstacles[j]))
        throw WorkspaceError(tag + " overlaps obstacle " + std::to_string(j));
  }
}

bool Workspace::in_free_space(const Vec2& p) const {
  if (!point_in_polygon(p, boundary)) return false;
  for (const Polygon& o : obstacles) {
    bool on_edge = false;
    for (size_t i = 0; i < o.size() && !on_edge; ++i)
      on_edge = point_on_segment(p, o[i], o[(i + 1) % o.size()]);
    if (!on_edge && point_in_polygon(p, o)) return false;
  }
  return true;
}

bool Workspace::segment_in_free_space(const Vec2& a, const Vec2& b) const {
  if (!in_free_space(a) || !in_free_space(b)) return false;
  for (const Polygon& o : obstacles)
    if (segment_intersects_polygon(a, b, o)) return false;
  // the segment must not leave the boundary
  for (size_t i = 0; i < boundary.size(); ++i) {
    const Vec2& c = boundary[i];
    const Vec2& d = boundary[(i + 1) % boundary.size()];
    const int o1 = cross2(b - a, c - a) > kGeomTol    ? 1
                   : cross2(b - a, c - a) < -kGeomTol ? -1
                                                      : 0;
    const int o2 = cross2(b - a, d - a) > kGeomTol    ? 1
                   : cross2(b - a, d - a) < -kGeomTol ? -1
                                                      : 0;
    const int o3 = cross2(d - c, a - c) > kGeomTol    ? 1
                   : cross2(d - c, a - c) < -kGeomTol ? -1
                                                      : 0;
    const int o4 = cross2(d - c, b - c) > kGeomTol    ? 1
                   : cross2(d - c, b - c) < -kGeomTol ? -1
                                                      : 0;
    if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0)
      return false;  // proper crossing of the boundary
  }
  // a segment can leave a non-convex boundary through a notch while both
  // crossings land exactly on its endpoints; sample the interior as well
  for (double t : {0.5, 0.25, 0.75}) {
    if (!in_free_space(a + t * (b - a))) return false;
  }
  return true;
}

}  // namespace ferry::geom
