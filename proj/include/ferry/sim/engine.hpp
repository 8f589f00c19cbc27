// ============================================================================
// sim/engine.hpp — deterministic fixed-timestep execution of a scenario
//
// One engine drives three strategies: the dynamic meeting protocol, parked
// relays (static one), and the single connected group (static two).  The
// engine integrates unicycle kinematics, executes each source's synthesized
// plan, runs the meeting protocol over step-quantized range contacts, and
// logs an event stream plus per-step metrics.
// ============================================================================
#pragma once

#include <map>

#include "ferry/scenario/scenario.hpp"
#include "ferry/sim/types.hpp"

namespace ferry::sim {

enum class Mode { Dynamic, StaticOne, StaticTwo };

/// Everything a compliance check needs about one source, with no pointers
/// into engine internals.
struct SourceTrace {
  int robot_id = -1;
  std::vector<int> plan_prefix;  // model-state ids, ends at the anchor
  std::vector<int> plan_cycle;   // repeated forever after the prefix
  double prefix_cost = 0.0, suffix_cost = 0.0;
  std::vector<int> executed;          // states completed, in order
  std::vector<double> anchor_times;   // completion times of cycle closings
};

struct SimResult {
  std::vector<SimEvent> events;
  MetricsLog metrics;
  std::map<int, int> uploads_by_type;  // cumulative units per data type
  int total_uploads = 0;
  double total_wait = 0.0;  // summed realized waits at meeting waypoints
  std::vector<SourceTrace> traces;
  double wall_clock_seconds = 0.0;
};

/// Run the scenario to its horizon.  Deterministic for a fixed scenario,
/// mode, and seed.  Throws InvariantViolation when a safety invariant breaks
/// (a bug trap) and SimError for setup problems.
SimResult run_simulation(const scenario::Scenario& s, Mode mode = Mode::Dynamic);

}  // namespace ferry::sim
