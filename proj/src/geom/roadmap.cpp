#include "ferry/geom/roadmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace ferry::geom {

bool Roadmap::has_edge(int a, int b) const {
  for (const auto& [n, w] : adjacency[a])
    if (n == b) return true;
  return false;
}

void Roadmap::add_edge(int a, int b) {
  if (a == b || has_edge(a, b)) return;
  const double w = (waypoints[a] - waypoints[b]).norm();
  adjacency[a].emplace_back(b, w);
  adjacency[b].emplace_back(a, w);
}

int Roadmap::snap(const Vec2& p) const {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < num_waypoints(); ++i) {
    const double d = (waypoints[i] - p).norm();
    if (d < best_d - kGeomTol) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

Roadmap build_lattice_roadmap(const Workspace& w, double pitch) {
  if (pitch <= 0) throw WorkspaceError("lattice pitch must be positive");
  w.validate();

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const Vec2& p : w.boundary) {
    xmin = std::min(xmin, p.x());
    xmax = std::max(xmax, p.x());
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  }

  Roadmap r;
  const int nx = static_cast<int>(std::floor((xmax - xmin) / pitch)) + 1;
  const int ny = static_cast<int>(std::floor((ymax - ymin) / pitch)) + 1;
  std::vector<std::vector<int>> grid(nx, std::vector<int>(ny, -1));
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      const Vec2 p(xmin + ix * pitch, ymin + iy * pitch);
      if (!w.in_free_space(p)) continue;
      grid[ix][iy] = r.num_waypoints();
      r.waypoints.push_back(p);
    }
  }
  if (r.waypoints.empty()) throw WorkspaceError("free space is empty");
  r.adjacency.resize(r.waypoints.size());

  const int dx[] = {1, 0, 1, 1};
  const int dy[] = {0, 1, 1, -1};  // 8-connectivity, each pair once
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      if (grid[ix][iy] < 0) continue;
      for (int k = 0; k < 4; ++k) {
        const int jx = ix + dx[k], jy = iy + dy[k];
        if (jx < 0 || jx >= nx || jy < 0 || jy >= ny || grid[jx][jy] < 0)
          continue;
        if (w.segment_in_free_space(r.waypoints[grid[ix][iy]],
                                    r.waypoints[grid[jx][jy]]))
          r.add_edge(grid[ix][iy], grid[jx][jy]);
      }
    }
  }
  return r;
}

Roadmap build_roadmap(const Workspace& w, const RoadmapConfig& cfg) {
  switch (cfg.builder) {
    case RoadmapBuilder::Lattice:
      return build_lattice_roadmap(w, cfg.lattice_pitch);
    case RoadmapBuilder::Triangulation:
      return build_triangulation_roadmap(w);
  }
  throw WorkspaceError("unknown roadmap builder");
}

std::optional<std::vector<int>> shortest_path(const Roadmap& r, int from,
                                              int to,
                                              const std::set<int>& excluded) {
  const int n = r.num_waypoints();
  if (from < 0 || from >= n || to < 0 || to >= n)
    throw std::out_of_range("shortest_path: unknown waypoint");
  if (excluded.count(from) || excluded.count(to))
    throw std::invalid_argument("shortest_path: endpoint excluded");
  if (from == to) return std::vector<int>{from};

  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<int> prev(n, -1);
  using QE = std::pair<double, int>;
  std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
  dist[from] = 0;
  pq.emplace(0.0, from);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    if (u == to) break;
    for (const auto& [v, w] : r.adjacency[u]) {
      if (excluded.count(v)) continue;
      if (d + w < dist[v]) {
        dist[v] = d + w;
        prev[v] = u;
        pq.emplace(dist[v], v);
      }
    }
  }
  if (prev[to] < 0) return std::nullopt;
  std::vector<int> path;
  for (int v = to; v != -1; v = prev[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

double travel_time_points(const std::vector<Vec2>& pts, double v_ref,
                          double omega_ref) {
  if (v_ref <= 0 || omega_ref <= 0)
    throw std::invalid_argument("reference velocities must be positive");
  double t = 0.0;
  for (size_t k = 0; k + 1 < pts.size(); ++k)
    t += (pts[k + 1] - pts[k]).norm() / v_ref;
  for (size_t k = 0; k + 2 < pts.size(); ++k) {
    const Vec2 u = pts[k + 1] - pts[k];
    const Vec2 v = pts[k + 2] - pts[k + 1];
    if (u.norm() < kGeomTol || v.norm() < kGeomTol) continue;
    t += std::abs(heading_change(u, v)) / omega_ref;
  }
  return t;
}

double travel_time(const Roadmap& r, const std::vector<int>& path,
                   double v_ref, double omega_ref) {
  std::vector<Vec2> pts;
  pts.reserve(path.size());
  for (int i : path) pts.push_back(r.waypoints[i]);
  return travel_time_points(pts, v_ref, omega_ref);
}

std::vector<double> path_timestamps(const Roadmap& r,
                                    const std::vector<int>& path, double v_ref,
                                    double omega_ref, double t0) {
  std::vector<double> ts;
  ts.reserve(path.size());
  double t = t0;
  ts.push_back(t);
  for (size_t k = 0; k + 1 < path.size(); ++k) {
    if (k > 0) {
      const Vec2 u = r.waypoints[path[k]] - r.waypoints[path[k - 1]];
      const Vec2 v = r.waypoints[path[k + 1]] - r.waypoints[path[k]];
      if (u.norm() >= kGeomTol && v.norm() >= kGeomTol)
        t += std::abs(heading_change(u, v)) / omega_ref;
    }
    t += (r.waypoints[path[k + 1]] - r.waypoints[path[k]]).norm() / v_ref;
    ts.push_back(t);
  }
  return ts;
}

}  // namespace ferry::geom
