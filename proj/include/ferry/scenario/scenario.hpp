// ============================================================================
// scenario/scenario.hpp — the experiment description: workspace, team,
// regions, actions, tasks, simulation settings, and variant switches
// ============================================================================
#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "ferry/agent/model.hpp"
#include "ferry/sim/types.hpp"

namespace ferry::scenario {

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Role { Source, Relay };

struct RobotSpec {
  int id = -1;
  Role role = Role::Source;
  geom::Vec2 start{0.0, 0.0};
  double heading = 0.0;
  double v_ref = 0.5;      // m/s
  double omega_ref = 0.1;  // rad/s
  double range = 1.0;      // communication radius, meters
  int capacity = 5;        // buffer bound, units
  std::string task;        // LTL over region+action labels; sources only
};

struct FaultInjection {
  double time = 0.0;
  int robot_id = -1;
};

struct JoinInjection {
  double time = 0.0;
  RobotSpec robot;
};

struct LeaveInjection {
  double time = 0.0;
  int robot_id = -1;
};

struct Scenario {
  std::string name;
  int schema = 1;
  geom::Workspace workspace;
  geom::RoadmapConfig roadmap;
  std::vector<agent::RegionOfInterest> regions;
  std::vector<agent::ActionSpec> actions;  // shared set, exactly one idle
  std::vector<RobotSpec> robots;           // ids are dense, ascending
  sim::SimConfig sim;

  // variant switches
  bool swap_enabled = true;
  bool fault_policy_enabled = true;
  double t_max = 30.0;  // maximum waiting time at a meeting waypoint
  bool use_data_center = false;
  geom::Vec2 data_center{0.0, 0.0};
  std::vector<FaultInjection> faults;
  std::vector<JoinInjection> joins;
  std::vector<LeaveInjection> leaves;

  // when lo < hi, each robot's reference speeds are scaled per seed by a
  // factor drawn uniformly from these intervals (deterministically, in id
  // order), so relative speed differences within the team persist
  double v_lo = 0.0, v_hi = 0.0;
  double omega_lo = 0.0, omega_hi = 0.0;
};

/// All validation problems, empty when the scenario is runnable.  Checks the
/// workspace, region/action well-formedness, unique dense robot ids,
/// capacity >= every action's data units, task parseability over the
/// region+action alphabet, the existence of a data-gathering action, and
/// that every source starts within communication range of some relay.
std::vector<std::string> validate(const Scenario& s);

nlohmann::json to_json(const Scenario& s);
Scenario from_json(const nlohmann::json& j);

/// Load and fully validate; throws ScenarioError listing every problem.
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

std::vector<std::string> bundled_names();
/// Throws ScenarioError for unknown names.
Scenario bundled_scenario(const std::string& name);

}  // namespace ferry::scenario
