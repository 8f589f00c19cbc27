// ============================================================================
// geom/roadmap.hpp — waypoint graph over free space
//
// Two builders share the Roadmap contract: a free-space lattice (default)
// and an ear-clipping triangulation that follows the navigation-mesh idiom
// (waypoints at triangle centroids and shared-edge midpoints).
// ============================================================================
#pragma once

#include <array>
#include <optional>
#include <set>
#include <vector>

#include "ferry/geom/workspace.hpp"

namespace ferry::geom {

struct Roadmap {
  std::vector<Vec2> waypoints;
  // adjacency[i] holds (neighbor, Euclidean edge length)
  std::vector<std::vector<std::pair<int, double>>> adjacency;

  int num_waypoints() const { return static_cast<int>(waypoints.size()); }
  bool has_edge(int a, int b) const;
  void add_edge(int a, int b);

  /// Nearest waypoint by Euclidean distance; ties by lowest index.
  int snap(const Vec2& p) const;
};

enum class RoadmapBuilder { Lattice, Triangulation };

struct RoadmapConfig {
  RoadmapBuilder builder = RoadmapBuilder::Lattice;
  double lattice_pitch = 1.0;  // meters
};

/// Free-space lattice with 8-neighbor connectivity; candidate points and
/// edges are rejected when they leave free space.
Roadmap build_lattice_roadmap(const Workspace& w, double pitch);

/// Triangulation of the free space (ear clipping with hole bridging);
/// waypoints at triangle centroids and shared-edge midpoints.
Roadmap build_triangulation_roadmap(const Workspace& w);

Roadmap build_roadmap(const Workspace& w, const RoadmapConfig& cfg);

/// Minimum-length path avoiding `excluded` waypoints, or nullopt when
/// disconnected under the exclusion.  Endpoints may not be excluded.
std::optional<std::vector<int>> shortest_path(const Roadmap& r, int from,
                                              int to,
                                              const std::set<int>& excluded);

/// Travel-time estimate for a waypoint path: segment lengths over v_ref plus
/// absolute interior heading changes over omega_ref.
double travel_time(const Roadmap& r, const std::vector<int>& path,
                   double v_ref, double omega_ref);
double travel_time_points(const std::vector<Vec2>& pts, double v_ref,
                          double omega_ref);

/// Per-waypoint cumulative arrival times along a path, starting at t0.
std::vector<double> path_timestamps(const Roadmap& r,
                                    const std::vector<int>& path, double v_ref,
                                    double omega_ref, double t0);

/// Ear-clipping triangulation of a polygon with holes; returns triangles as
/// vertex triples.  Exposed for the builder's tests.
std::vector<std::array<Vec2, 3>> triangulate_with_holes(
    const Polygon& boundary, const std::vector<Polygon>& holes);

}  // namespace ferry::geom
