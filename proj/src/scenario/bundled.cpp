#include <cmath>

#include "ferry/scenario/scenario.hpp"

namespace ferry::scenario {

namespace {

geom::Polygon rect(double w, double h) {
  return {{0, 0}, {w, 0}, {w, h}, {0, h}};
}

RobotSpec source(int id, geom::Vec2 start, int capacity,
                 const std::string& task, double range, double v, double om) {
  RobotSpec r;
  r.id = id;
  r.role = Role::Source;
  r.start = start;
  r.v_ref = v;
  r.omega_ref = om;
  r.range = range;
  r.capacity = capacity;
  r.task = task;
  return r;
}

RobotSpec relay(int id, geom::Vec2 start, int capacity, double range, double v,
                double om) {
  RobotSpec r;
  r.id = id;
  r.role = Role::Relay;
  r.start = start;
  r.v_ref = v;
  r.omega_ref = om;
  r.range = range;
  r.capacity = capacity;
  return r;
}

std::string patrol(const std::string& ra, const std::string& rb,
                   const std::string& g) {
  return "[]<>(" + ra + " && " + g + ") && []<>(" + rb + " && " + g + ")";
}

// small workspaces shared by the tiny scenarios
Scenario tiny_base(const std::string& name, int num_region_pairs) {
  Scenario s;
  s.name = name;
  s.workspace.boundary = rect(10, 2.0 + 3.0 * num_region_pairs);
  s.roadmap.lattice_pitch = 1.0;
  s.actions.push_back({"g0", 0.0, 0, 0, true});
  for (int p = 0; p < num_region_pairs; ++p) {
    const double y = 2.0 + 3.0 * p;
    s.regions.push_back({"r" + std::to_string(2 * p + 1), {2.0, y}, -1});
    s.regions.push_back({"r" + std::to_string(2 * p + 2), {8.0, y}, -1});
    s.actions.push_back(
        {"g" + std::to_string(p + 1), 1.0, 2, p + 1, false});
  }
  s.sim.horizon = 120.0;
  s.sim.rng_seed = 0;
  s.swap_enabled = true;
  return s;
}

Scenario paper_base() {
  Scenario s;
  s.name = "paper_12robot";
  s.workspace.boundary = rect(14, 10);
  s.roadmap.lattice_pitch = 1.0;
  // nine regions on a 3x3 grid, three data types
  const char* names[9] = {"r1", "r2", "r3", "r4", "r5", "r6",
                          "r7", "r8", "r9"};
  int k = 0;
  for (double y : {2.0, 5.0, 8.0})
    for (double x : {2.0, 6.0, 10.0})
      s.regions.push_back({names[k++], {x, y}, -1});
  s.actions.push_back({"g0", 0.0, 0, 0, true});
  s.actions.push_back({"g1", 1.0, 2, 1, false});
  s.actions.push_back({"g2", 1.0, 2, 2, false});
  s.actions.push_back({"g3", 1.0, 2, 3, false});

  const double range = 1.2, v = 0.65, om = 1.0;
  // three clusters, each with three sources plus a relay, patrolling one row
  // of regions; small buffers force frequent dumps
  s.robots.push_back(source(0, {13.0, 2.0}, 4, patrol("r1", "r2", "g1"), range, v, om));
  s.robots.push_back(source(1, {13.0, 2.0}, 5, patrol("r2", "r3", "g2"), range, v, om));
  s.robots.push_back(source(2, {13.0, 2.0}, 3, patrol("r1", "r3", "g3"), range, v, om));
  s.robots.push_back(source(3, {13.0, 5.0}, 4, patrol("r4", "r5", "g1"), range, v, om));
  s.robots.push_back(source(4, {13.0, 5.0}, 5, patrol("r5", "r6", "g2"), range, v, om));
  s.robots.push_back(source(5, {13.0, 5.0}, 5, patrol("r4", "r6", "g3"), range, v, om));
  s.robots.push_back(source(6, {13.0, 8.0}, 4, patrol("r7", "r8", "g1"), range, v, om));
  s.robots.push_back(source(7, {13.0, 8.0}, 5, patrol("r8", "r9", "g2"), range, v, om));
  s.robots.push_back(source(8, {13.0, 8.0}, 3, patrol("r7", "r9", "g3"), range, v, om));
  // relays are lighter platforms and move faster than the loaded sources
  const double v_rel = 1.3;
  s.robots.push_back(relay(9, {13.0, 2.0}, 5, range, v_rel, om));
  s.robots.push_back(relay(10, {13.0, 5.0}, 5, range, v_rel, om));
  s.robots.push_back(relay(11, {13.0, 8.0}, 5, range, v_rel, om));

  s.sim.horizon = 100.0;
  s.v_lo = 0.8;
  s.v_hi = 1.2;
  s.omega_lo = 0.8;
  s.omega_hi = 1.2;
  return s;
}

}  // namespace

std::vector<std::string> bundled_names() {
  return {"tiny_1x1",      "tiny_1x2",
          "tiny_1x3",      "paper_12robot",
          "paper_12robot_faults", "paper_12robot_center"};
}

Scenario bundled_scenario(const std::string& name) {
  const double v = 0.5, om = 0.5, range = 2.0;
  if (name == "tiny_1x1") {
    Scenario s = tiny_base(name, 1);
    s.robots.push_back(source(0, {2, 2}, 4, patrol("r1", "r2", "g1"), range, v, om));
    s.robots.push_back(relay(1, {3, 2}, 5, range, v, om));
    return s;
  }
  if (name == "tiny_1x2") {
    Scenario s = tiny_base(name, 2);
    s.robots.push_back(source(0, {2, 2}, 4, patrol("r1", "r2", "g1"), range, v, om));
    s.robots.push_back(source(1, {2, 5}, 4, patrol("r3", "r4", "g2"), range, v, om));
    s.robots.push_back(relay(2, {2, 3}, 5, range, v, om));
    return s;
  }
  if (name == "tiny_1x3") {
    Scenario s = tiny_base(name, 3);
    s.robots.push_back(source(0, {2, 2}, 3, patrol("r1", "r2", "g1"), range, v, om));
    s.robots.push_back(source(1, {2, 5}, 3, patrol("r3", "r4", "g2"), range, v, om));
    s.robots.push_back(source(2, {3, 4}, 3, patrol("r5", "r6", "g3"), range, v, om));
    s.robots.push_back(relay(3, {2, 4}, 5, range, v, om));
    return s;
  }
  if (name == "paper_12robot") return paper_base();
  if (name == "paper_12robot_faults") {
    Scenario s = paper_base();
    s.name = name;
    // four failures at t = 50 s: three sources and one relay
    s.faults = {{50.0, 1}, {50.0, 4}, {50.0, 7}, {50.0, 10}};
    // four joins at t = 50 s: a fresh relay first, then three sources that
    // appear inside its range so the connectivity precondition holds
    const double v12 = 0.65, om12 = 1.0, r12 = 1.5;
    s.joins.push_back({50.0, relay(12, {5, 2}, 5, r12, v12, om12)});
    s.joins.push_back(
        {50.0, source(13, {5, 3}, 4, patrol("r2", "r5", "g1"), r12, v12, om12)});
    s.joins.push_back(
        {50.0, source(14, {6, 2}, 4, patrol("r2", "r3", "g2"), r12, v12, om12)});
    s.joins.push_back(
        {50.0, source(15, {4, 2}, 4, patrol("r1", "r2", "g3"), r12, v12, om12)});
    return s;
  }
  if (name == "paper_12robot_center") {
    Scenario s = paper_base();
    s.name = name;
    s.use_data_center = true;
    s.data_center = {7.0, 5.0};
    return s;
  }
  throw ScenarioError("unknown bundled scenario '" + name + "'");
}

}  // namespace ferry::scenario
