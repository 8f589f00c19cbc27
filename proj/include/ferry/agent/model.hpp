// ============================================================================
// agent/model.hpp — per-robot motion FTS and the composed motion+action model
//
// The motion FTS connects regions of interest through exclusion-respecting
// shortest roadmap paths.  The composed model's states are (region, action)
// pairs; a transition either moves between regions while settling into the
// idle action, or stays in place and switches actions.
// ============================================================================
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ferry/agent/buffer.hpp"
#include "ferry/geom/roadmap.hpp"

namespace ferry::agent {

struct RegionOfInterest {
  std::string label;
  geom::Vec2 point;
  int snapped_waypoint = -1;  // filled by build_motion_fts
};

struct ActionSpec {
  std::string label;
  double duration = 0.0;  // seconds
  int data_units = 0;     // gathered per execution
  int data_type = 0;
  bool idle = false;  // the do-nothing action every robot carries
};

/// Gather according to an action (idle actions are no-ops).
inline void apply_gather(BufferLedger& b, const ActionSpec& a, double t) {
  apply_gather(b, a.data_units, a.data_type, t);
}

struct MotionTransition {
  int from = -1, to = -1;     // region indices
  std::vector<int> path;      // roadmap waypoints, from → to
  double duration = 0.0;      // travel-time estimate over the path
};

struct MotionFts {
  std::vector<RegionOfInterest> regions;
  std::vector<MotionTransition> transitions;
  int initial = 0;  // region index

  /// Transition from → to, or nullptr.
  const MotionTransition* find(int from, int to) const;
};

/// Connect every region pair whose shortest path avoids all other regions'
/// waypoints; durations follow the travel-time estimate.  Throws when some
/// region is unreachable from the initial one or regions snap onto the same
/// waypoint.
MotionFts build_motion_fts(const geom::Roadmap& r,
                           std::vector<RegionOfInterest> regions, double v_ref,
                           double omega_ref, int initial = 0);

struct RobotModel {
  MotionFts fts;
  std::vector<ActionSpec> actions;
  int idle_action = -1;

  struct Transition {
    int from = -1, to = -1;   // state ids
    double duration = 0.0;    // motion time (if any) + target action duration
    int motion = -1;          // index into fts.transitions, -1 if in place
  };
  std::vector<Transition> transitions;
  std::vector<std::vector<int>> outgoing;  // state → transition indices
  int initial_state = -1;

  int num_states() const {
    return static_cast<int>(fts.regions.size() * actions.size());
  }
  int state_id(int region, int action) const {
    return region * static_cast<int>(actions.size()) + action;
  }
  int region_of(int state) const {
    return state / static_cast<int>(actions.size());
  }
  int action_of(int state) const {
    return state % static_cast<int>(actions.size());
  }
  /// Propositions holding in a state: its region label and action label.
  std::set<std::string> label(int state) const;
};

/// Def-style composition: motion steps land in the idle action; in-place
/// steps switch between arbitrary actions.  Requires exactly one idle action
/// with zero data units.
RobotModel compose_robot_model(MotionFts fts, std::vector<ActionSpec> actions);

}  // namespace ferry::agent
