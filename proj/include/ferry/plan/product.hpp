// ============================================================================
// plan/product.hpp — guard-filtered product of a robot model and an NBA
//
// Product states pair a (region, action) robot-model state with an NBA state.
// A product transition exists iff the robot model can take the step and the
// NBA has a guard satisfied by the label of the *successor* model state;
// durations are copied from the robot model.
// ============================================================================
#pragma once

#include <stdexcept>
#include <vector>

#include "ferry/agent/model.hpp"
#include "ferry/ltl/nba.hpp"

namespace ferry::plan {

struct PlanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProductAutomaton {
  int num_model_states = 0;
  int num_nba_states = 0;

  struct Transition {
    int from = -1, to = -1;  // product state ids
    double duration = 0.0;
    int model_transition = -1;  // index into the robot model's transitions
  };
  std::vector<Transition> transitions;
  std::vector<std::vector<int>> outgoing;  // product state → transition idx
  std::vector<int> initial;                // product state ids, ascending
  std::vector<char> accepting;             // size num_states()

  int num_states() const { return num_model_states * num_nba_states; }
  int state_id(int model_state, int nba_state) const {
    return model_state * num_nba_states + nba_state;
  }
  int model_state_of(int s) const { return s / num_nba_states; }
  int nba_state_of(int s) const { return s % num_nba_states; }
};

/// Synchronous product.  Initial product states are (initial model state, q)
/// for every NBA step q0 → q whose guard matches the initial state's label;
/// a product state is accepting iff its NBA component is.  Throws PlanError
/// when the automaton mentions propositions the model never produces.
ProductAutomaton build_product(const agent::RobotModel& m,
                               const ltl::BuchiAutomaton& a);

}  // namespace ferry::plan
