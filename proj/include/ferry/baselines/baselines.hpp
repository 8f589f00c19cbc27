// ============================================================================
// baselines/baselines.hpp — comparison strategies for the meeting protocol
//
// Two execution baselines reuse the simulation engine: parked relays
// (static one) and the single connected group (static two).  The third
// baseline is a centralized planner: it composes every robot into one joint
// transition system, conjoins all local tasks over per-robot namespaced
// propositions, and synthesizes one optimal prefix–suffix plan for the
// whole team.  Because the joint state count is the product of the
// per-robot counts, construction refuses instances whose estimate exceeds a
// configurable bound instead of exhausting memory.
// ============================================================================
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ferry/agent/model.hpp"
#include "ferry/ltl/nba.hpp"
#include "ferry/plan/synthesis.hpp"
#include "ferry/scenario/scenario.hpp"
#include "ferry/sim/engine.hpp"

namespace ferry::baselines {

struct BaselinesError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when the joint state-space estimate exceeds the requested bound.
struct StateSpaceBound : BaselinesError {
  StateSpaceBound(double estimate, double bound);
  double estimated_states = 0.0;
  double bound = 0.0;
};

/// The team as one transition system.  A joint state stores, per source,
/// its (region, action) model state and buffer level, and per relay, its
/// parked waypoint (an index into relay_waypoints) and buffer level.  A
/// joint transition is a synchronous step: every robot picks a local move
/// (or stays put — sources only while idling) and the step lasts as long as
/// the slowest participant.  Whenever a source ends a step on a relay's
/// waypoint it hands over its buffered data; handover and upload are
/// instantaneous here, so joint plan costs lower-bound any scheme that pays
/// for transfers.
struct ComposedSystem {
  struct SourceComponent {
    int robot_id = -1;
    agent::RobotModel model;
    int capacity = 0;
    std::string prefix;  // proposition namespace, e.g. "s0_"
  };
  struct RelayComponent {
    int robot_id = -1;
    int capacity = 0;
    int start_index = 0;                // into relay_waypoints
    std::vector<std::vector<double>> travel;  // index × index seconds
  };

  std::vector<SourceComponent> sources;
  std::vector<RelayComponent> relays;
  std::vector<int> relay_waypoints;  // region waypoints + relay starts

  // Reachable joint graph.  Encoding per state: for each source
  // (model_state, buffer), then for each relay (waypoint index, buffer).
  std::vector<std::vector<int>> states;
  struct JointTransition {
    int from = -1, to = -1;
    double duration = 0.0;
  };
  std::vector<JointTransition> transitions;
  std::vector<std::vector<int>> outgoing;  // state → transition indices
  int initial_state = 0;
  std::vector<ltl::Letter> labels;  // namespaced source labels per state

  double estimated_states = 0.0;  // closed-form joint-space size

  int num_sources() const { return static_cast<int>(sources.size()); }
  int source_model_state(int joint, int i) const {
    return states[joint][2 * i];
  }
  int source_buffer(int joint, int i) const { return states[joint][2 * i + 1]; }
  int relay_waypoint_index(int joint, int j) const {
    return states[joint][2 * num_sources() + 2 * j];
  }
};

/// Closed-form size of the unexplored joint space: the product over sources
/// of model states × buffer levels and over relays of candidate waypoints ×
/// buffer levels.  Cheap — builds only the per-robot models.
double estimate_joint_states(const scenario::Scenario& s);

/// Builds the reachable joint graph via breadth-first search.  Throws
/// StateSpaceBound (with the closed-form estimate) before exploring when
/// the estimate exceeds `state_bound`, and during exploration if the
/// reachable set itself outgrows the bound.
ComposedSystem build_composed_system(const scenario::Scenario& s,
                                     double state_bound = 2e6);

struct CentralizedPlan {
  ComposedSystem system;
  ltl::BuchiAutomaton nba;            // conjunction of namespaced tasks
  plan::PrefixSuffixPlan product_plan;  // product state ids
  std::vector<int> prefix;            // joint state ids, ends at the anchor
  std::vector<int> suffix;            // cycle from the anchor
  double prefix_cost = 0.0;
  double suffix_cost = 0.0;
  double synthesis_seconds = 0.0;     // wall clock for the whole pipeline
};

/// Full centralized pipeline: compose the team, conjoin all tasks under
/// per-source namespaces, build the joint product, and synthesize the
/// minimum-cost prefix–suffix plan.  Throws StateSpaceBound as above and
/// BaselinesError when the conjunction is unsatisfiable over the system.
CentralizedPlan centralized_synthesize(const scenario::Scenario& s,
                                       double state_bound = 2e6);

/// Engine-backed baselines: relays parked at their deployment points, and
/// the whole team moving as one connected group.
sim::SimResult run_static_one(const scenario::Scenario& s);
sim::SimResult run_static_two(const scenario::Scenario& s);

}  // namespace ferry::baselines
