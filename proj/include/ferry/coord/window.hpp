// ============================================================================
// coord/window.hpp — meet-window computation over an unrolled plan
//
// A source robot scans its infinite plan for the last state it can still
// reach without overflowing its buffer, then broadcasts the timed route of
// the following transition as a meeting request.
// ============================================================================
#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "ferry/agent/model.hpp"
#include "ferry/plan/synthesis.hpp"

namespace ferry::coord {

struct CoordError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TimedPath {
  std::vector<int> waypoints;
  std::vector<double> times;  // strictly increasing, one per waypoint
};

struct MeetRequest {
  int source_id = -1;
  TimedPath path;  // planned route between the window state and its successor
};

/// Shortest-path travel times between roadmap waypoints for one robot's
/// reference velocities, with path caching.
class TravelOracle {
 public:
  TravelOracle(const geom::Roadmap& r, double v_ref, double omega_ref);

  /// Travel-time estimate from → to; throws CoordError when unreachable.
  double operator()(int from, int to) const;
  /// The cached shortest waypoint path (front = from, back = to).
  const std::vector<int>& path(int from, int to) const;
  const geom::Roadmap& roadmap() const { return *roadmap_; }
  double v_ref() const { return v_ref_; }
  double omega_ref() const { return omega_ref_; }

 private:
  const geom::Roadmap* roadmap_;
  double v_ref_, omega_ref_;
  mutable std::map<std::pair<int, int>, std::vector<int>> cache_;
};

/// A synthesized plan flattened to its infinite model-state sequence
/// prefix · cycle^ω, with per-index gather amounts, durations, and routes.
struct UnrolledPlan {
  const agent::RobotModel* model = nullptr;
  std::vector<int> prefix;  // model states; back() is the accepting anchor
  std::vector<int> cycle;   // states after the prefix, repeated forever

  int state_at(int k) const;
  int gather_at(int k) const;
  int data_type_at(int k) const;
  int region_waypoint_at(int k) const;
  /// The robot-model transition taken from index k to k+1.
  const agent::RobotModel::Transition& transition_at(int k) const;
};

/// Project a product-level plan onto the robot model and flatten it.
UnrolledPlan unroll_plan(const agent::RobotModel& m,
                         const plan::ProductAutomaton& p,
                         const plan::PrefixSuffixPlan& plan);

struct MeetWindow {
  int k_e = -1;         // last index reachable without a meeting
  MeetRequest request;  // timed route from state k_e to k_e + 1
  int resume_index = -1;       // k_e + 1: where execution continues after
  double resume_depart = 0.0;  // estimated departure time from that state
};

/// Find the unique window index: stored units plus everything gathered over
/// indices [k_t, k_e] stays within capacity while including k_e + 1 would
/// exceed it.  `depart_kt` is the estimated time the robot leaves state k_t
/// after completing its action there; `stored` excludes that action's yield.
/// Throws CoordError when the budget is already exceeded at k_t or the plan
/// never gathers data.
MeetWindow compute_meet_window(const UnrolledPlan& plan, int k_t,
                               double depart_kt, int stored, int capacity,
                               int source_id, const geom::Roadmap& r,
                               double v_ref, double omega_ref);

}  // namespace ferry::coord
