#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ferry/geom/geometry.hpp"

namespace ferry::geom {

struct WorkspaceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bounded 2-D workspace: a simple boundary polygon with polygonal holes.
/// The free space is the boundary interior minus the obstacle interiors.
struct Workspace {
  Polygon boundary;                 // CCW
  std::vector<Polygon> obstacles;   // CCW as declared, stored CCW

  /// Checks the structural invariants (orientation, containment,
  /// disjointness, nondegeneracy).  Throws WorkspaceError.
  void validate() const;

  bool in_free_space(const Vec2& p) const;

  /// True if the whole segment lies in free space.
  bool segment_in_free_space(const Vec2& a, const Vec2& b) const;
};

}  // namespace ferry::geom
