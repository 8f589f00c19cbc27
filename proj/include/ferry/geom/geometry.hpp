// ============================================================================
// geom/geometry.hpp — planar primitives used by the roadmap builders
// ============================================================================
#pragma once

#include <Eigen/Core>
#include <vector>

namespace ferry::geom {

using Vec2 = Eigen::Vector2d;
using Polygon = std::vector<Vec2>;  // simple polygon, CCW orientation

inline constexpr double kGeomTol = 1e-9;

double cross2(const Vec2& a, const Vec2& b);

/// Signed area; positive for counterclockwise vertex order.
double signed_area(const Polygon& poly);

bool point_in_polygon(const Vec2& p, const Polygon& poly);
bool point_on_segment(const Vec2& p, const Vec2& a, const Vec2& b);

/// Proper or touching intersection of segments ab and cd.
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c,
                        const Vec2& d);

/// True if segment ab passes through the interior of the polygon (crossing an
/// edge or running inside); touching the boundary alone does not count.
bool segment_intersects_polygon(const Vec2& a, const Vec2& b,
                                const Polygon& poly);

/// Signed smallest rotation from u to v, in (-pi, pi].  Both must be nonzero.
double heading_change(const Vec2& u, const Vec2& v);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double theta);

}  // namespace ferry::geom
