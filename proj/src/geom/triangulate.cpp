// Triangulation of a polygon with holes.  Each hole is joined to the outer
// ring through two vertex-disjoint diagonals, splitting the region into two
// simple polygons; once no holes remain, plain ear clipping finishes the job.
// Splitting (rather than the usual single-bridge splice) keeps every
// intermediate ring free of duplicated vertices, which ear clipping handles
// reliably.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "ferry/geom/roadmap.hpp"

namespace ferry::geom {

namespace {

bool same_point(const Vec2& a, const Vec2& b) {
  return (a - b).norm() < kGeomTol;
}

// p lies on segment (a,b) but is not one of its endpoints
bool on_segment_interior(const Vec2& p, const Vec2& a, const Vec2& b) {
  return point_on_segment(p, a, b) && !same_point(p, a) && !same_point(p, b);
}

// True when the open interiors of segments (a,b) and (c,d) meet: a proper
// crossing, a collinear overlap of positive length, or an endpoint of one
// sitting strictly inside the other.  Mere endpoint coincidence is allowed.
bool interiors_intersect(const Vec2& a, const Vec2& b, const Vec2& c,
                         const Vec2& d) {
  auto side = [](const Vec2& u, const Vec2& v, const Vec2& p) {
    const double cr = cross2(v - u, p - u);
    return cr > kGeomTol ? 1 : cr < -kGeomTol ? -1 : 0;
  };
  const int o1 = side(a, b, c), o2 = side(a, b, d);
  const int o3 = side(c, d, a), o4 = side(c, d, b);
  if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0)
    return true;
  if (o1 == 0 && o2 == 0) {  // collinear: positive-length overlap?
    const Vec2 dir = (b - a).normalized();
    const double hi = (b - a).norm();
    double pc = dir.dot(c - a), pd = dir.dot(d - a);
    if (pc > pd) std::swap(pc, pd);
    return std::min(hi, pd) - std::max(0.0, pc) > kGeomTol;
  }
  return on_segment_interior(c, a, b) || on_segment_interior(d, a, b) ||
         on_segment_interior(a, c, d) || on_segment_interior(b, c, d);
}

bool strictly_inside_triangle(const Vec2& p, const Vec2& a, const Vec2& b,
                              const Vec2& c) {
  const double d1 = cross2(b - a, p - a);
  const double d2 = cross2(c - b, p - b);
  const double d3 = cross2(a - c, p - c);
  return d1 > kGeomTol && d2 > kGeomTol && d3 > kGeomTol;
}

// Classic ear clipping for a simple CCW polygon with distinct vertices.
void ear_clip_simple(std::vector<Vec2> poly,
                     std::vector<std::array<Vec2, 3>>& tris) {
  while (poly.size() > 3) {
    const size_t n = poly.size();
    bool clipped = false;
    for (size_t i = 0; i < n; ++i) {
      const Vec2& prev = poly[(i + n - 1) % n];
      const Vec2& cur = poly[i];
      const Vec2& next = poly[(i + 1) % n];
      if (cross2(cur - prev, next - cur) <= kGeomTol) continue;  // reflex
      bool ear = true;
      for (size_t j = 0; j < n && ear; ++j) {
        if (j == i || j == (i + n - 1) % n || j == (i + 1) % n) continue;
        const Vec2& p = poly[j];
        if (strictly_inside_triangle(p, prev, cur, next) ||
            on_segment_interior(p, prev, next) ||
            on_segment_interior(p, prev, cur) ||
            on_segment_interior(p, cur, next))
          ear = false;
      }
      if (!ear) continue;
      tris.push_back({prev, cur, next});
      poly.erase(poly.begin() + static_cast<long>(i));
      clipped = true;
      break;
    }
    if (!clipped) {
      // degenerate vertex (collinear spur): drop it and retry
      bool dropped = false;
      for (size_t i = 0; i < poly.size() && !dropped; ++i) {
        const size_t n2 = poly.size();
        const Vec2& prev = poly[(i + n2 - 1) % n2];
        const Vec2& cur = poly[i];
        const Vec2& next = poly[(i + 1) % n2];
        if (std::abs(cross2(cur - prev, next - cur)) <= kGeomTol) {
          poly.erase(poly.begin() + static_cast<long>(i));
          dropped = true;
        }
      }
      if (!dropped) throw WorkspaceError("ear clipping stuck on reflex ring");
    }
  }
  if (poly.size() == 3 &&
      std::abs(cross2(poly[1] - poly[0], poly[2] - poly[1])) > kGeomTol)
    tris.push_back({poly[0], poly[1], poly[2]});
}

// A diagonal is usable when it crosses no edge of the boundary or any hole
// and its interior stays inside the free region.
bool diagonal_clear(const Vec2& a, const Vec2& b, const Polygon& boundary,
                    const std::vector<Polygon>& holes) {
  auto against = [&](const Polygon& ring) {
    const size_t n = ring.size();
    for (size_t i = 0; i < n; ++i)
      if (interiors_intersect(a, b, ring[i], ring[(i + 1) % n])) return true;
    return false;
  };
  if (against(boundary)) return false;
  for (const Polygon& h : holes)
    if (against(h)) return false;
  for (double t : {0.5, 0.25, 0.75}) {
    const Vec2 p = a + t * (b - a);
    if (!point_in_polygon(p, boundary)) return false;
    for (const Polygon& h : holes)
      if (point_in_polygon(p, h)) return false;
  }
  return true;
}

// Shortest pair of clear, endpoint-disjoint, non-crossing diagonals from
// `hole` to `boundary`; diagonals are (boundary[p], hole[q]) and
// (boundary[r], hole[s]).
bool find_diagonal_pair(const Polygon& boundary, const Polygon& hole,
                        const std::vector<Polygon>& all, size_t& p, size_t& q,
                        size_t& r, size_t& s) {
  const size_t nb = boundary.size(), nh = hole.size();
  struct Cand {
    double len;
    size_t i, j;
  };
  std::vector<Cand> cands;
  cands.reserve(nb * nh);
  for (size_t i = 0; i < nb; ++i)
    for (size_t j = 0; j < nh; ++j) {
      const double len = (boundary[i] - hole[j]).norm();
      if (len >= kGeomTol) cands.push_back({len, i, j});
    }
  std::sort(cands.begin(), cands.end(),
            [](const Cand& a, const Cand& b) { return a.len < b.len; });
  std::vector<signed char> clear(cands.size(), -1);
  auto is_clear = [&](size_t k) {
    if (clear[k] < 0)
      clear[k] = diagonal_clear(boundary[cands[k].i], hole[cands[k].j],
                                boundary, all)
                     ? 1
                     : 0;
    return clear[k] == 1;
  };
  for (size_t a = 0; a < cands.size(); ++a) {
    if (!is_clear(a)) continue;
    for (size_t b = 0; b < cands.size(); ++b) {
      if (b == a || cands[b].i == cands[a].i || cands[b].j == cands[a].j)
        continue;
      if (interiors_intersect(boundary[cands[a].i], hole[cands[a].j],
                              boundary[cands[b].i], hole[cands[b].j]))
        continue;
      if (!is_clear(b)) continue;
      p = cands[a].i;
      q = cands[a].j;
      r = cands[b].i;
      s = cands[b].j;
      return true;
    }
  }
  return false;
}

// boundary CCW, holes CW
void triangulate_rec(const Polygon& boundary, std::vector<Polygon> holes,
                     std::vector<std::array<Vec2, 3>>& tris, int depth = 0) {
  if (depth > 200)
    throw WorkspaceError("hole splitting failed to make progress");
  if (holes.empty()) {
    ear_clip_simple(boundary, tris);
    return;
  }

  // An inner hole can be fully occluded from the boundary by other holes,
  // so split off whichever hole admits a diagonal pair.
  size_t p = 0, q = 0, r = 0, s = 0;
  size_t chosen = holes.size();
  for (size_t h = 0; h < holes.size(); ++h) {
    std::vector<Polygon> all = holes;  // every ring a diagonal must avoid
    if (find_diagonal_pair(boundary, holes[h], all, p, q, r, s)) {
      chosen = h;
      break;
    }
  }
  if (chosen == holes.size()) {
    // a hole may see only a single boundary vertex; split the nearest
    // visible boundary edge at its midpoint and retry
    const size_t nb0 = boundary.size();
    for (const Polygon& h : holes) {
      for (const Vec2& hv : h) {
        for (size_t e = 0; e < nb0; ++e) {
          const Vec2 mid = 0.5 * (boundary[e] + boundary[(e + 1) % nb0]);
          if ((mid - hv).norm() < kGeomTol) continue;
          if (!diagonal_clear(mid, hv, boundary, holes)) continue;
          Polygon grown = boundary;
          grown.insert(grown.begin() + static_cast<long>(e) + 1, mid);
          triangulate_rec(grown, std::move(holes), tris, depth + 1);
          return;
        }
      }
    }
    throw WorkspaceError("no pair of diagonals from hole to boundary");
  }
  const Polygon hole = std::move(holes[chosen]);
  holes.erase(holes.begin() + static_cast<long>(chosen));
  const size_t nb = boundary.size(), nh = hole.size();

  // Split along the diagonals (B[p],H[q]) and (B[r],H[s]).  The hole is CW,
  // so walking its arcs in storage order leaves the region on the left, as
  // the CCW parts require.
  Polygon part1, part2;
  for (size_t i = p;; i = (i + 1) % nb) {
    part1.push_back(boundary[i]);
    if (i == r) break;
  }
  for (size_t j = s;; j = (j + 1) % nh) {
    part1.push_back(hole[j]);
    if (j == q) break;
  }
  for (size_t i = r;; i = (i + 1) % nb) {
    part2.push_back(boundary[i]);
    if (i == p) break;
  }
  for (size_t j = q;; j = (j + 1) % nh) {
    part2.push_back(hole[j]);
    if (j == s) break;
  }
  const double a1 = signed_area(part1), a2 = signed_area(part2);
  const double want = signed_area(boundary) + signed_area(hole);
  if (a1 <= kGeomTol || a2 <= kGeomTol ||
      std::abs(a1 + a2 - want) > 1e-6 * std::max(1.0, std::abs(want)))
    throw WorkspaceError("hole split produced an inconsistent partition");

  std::vector<Polygon> holes1, holes2;
  for (Polygon& h : holes) {
    if (point_in_polygon(h[0], part1))
      holes1.push_back(std::move(h));
    else
      holes2.push_back(std::move(h));
  }
  triangulate_rec(part1, std::move(holes1), tris);
  triangulate_rec(part2, std::move(holes2), tris);
}

}  // namespace

std::vector<std::array<Vec2, 3>> triangulate_with_holes(
    const Polygon& boundary, const std::vector<Polygon>& holes) {
  Polygon ring = boundary;
  if (signed_area(ring) < 0) std::reverse(ring.begin(), ring.end());

  std::vector<Polygon> cw_holes = holes;
  for (Polygon& h : cw_holes)
    if (signed_area(h) > 0) std::reverse(h.begin(), h.end());

  std::vector<std::array<Vec2, 3>> tris;
  triangulate_rec(ring, std::move(cw_holes), tris);
  return tris;
}

Roadmap build_triangulation_roadmap(const Workspace& w) {
  w.validate();
  auto tris = triangulate_with_holes(w.boundary, w.obstacles);
  if (tris.empty()) throw WorkspaceError("free space is empty");

  Roadmap r;
  auto key_of = [](const Vec2& a, const Vec2& b) {
    auto q = [](double v) { return std::llround(v * 1e6); };
    std::array<long long, 4> k{q(a.x()), q(a.y()), q(b.x()), q(b.y())};
    std::array<long long, 4> rk{q(b.x()), q(b.y()), q(a.x()), q(a.y())};
    return std::min(k, rk);
  };

  std::vector<int> centroid_ids;
  std::map<std::array<long long, 4>, std::vector<size_t>> edge_tris;
  for (size_t t = 0; t < tris.size(); ++t) {
    const auto& tri = tris[t];
    centroid_ids.push_back(r.num_waypoints());
    r.waypoints.push_back((tri[0] + tri[1] + tri[2]) / 3.0);
    for (int e = 0; e < 3; ++e)
      edge_tris[key_of(tri[e], tri[(e + 1) % 3])].push_back(t);
  }
  r.adjacency.resize(r.waypoints.size());

  for (size_t t = 0; t < tris.size(); ++t) {
    const auto& tri = tris[t];
    for (int e = 0; e < 3; ++e) {
      const auto& sharers = edge_tris[key_of(tri[e], tri[(e + 1) % 3])];
      if (sharers.size() < 2) continue;  // boundary edge
      const Vec2 mid = 0.5 * (tri[e] + tri[(e + 1) % 3]);
      int mid_id = -1;
      for (int i = 0; i < r.num_waypoints() && mid_id < 0; ++i)
        if ((r.waypoints[i] - mid).norm() < kGeomTol) mid_id = i;
      if (mid_id < 0) {
        mid_id = r.num_waypoints();
        r.waypoints.push_back(mid);
        r.adjacency.emplace_back();
      }
      r.add_edge(centroid_ids[t], mid_id);
    }
  }
  return r;
}

}  // namespace ferry::geom
