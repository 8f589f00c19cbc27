#include "ferry/agent/model.hpp"

#include <queue>
#include <stdexcept>

namespace ferry::agent {

const MotionTransition* MotionFts::find(int from, int to) const {
  for (const MotionTransition& t : transitions)
    if (t.from == from && t.to == to) return &t;
  return nullptr;
}

MotionFts build_motion_fts(const geom::Roadmap& r,
                           std::vector<RegionOfInterest> regions, double v_ref,
                           double omega_ref, int initial) {
  const int n = static_cast<int>(regions.size());
  if (n == 0) throw std::invalid_argument("no regions");
  if (initial < 0 || initial >= n)
    throw std::out_of_range("initial region out of range");

  for (RegionOfInterest& reg : regions)
    reg.snapped_waypoint = r.snap(reg.point);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (regions[i].snapped_waypoint == regions[j].snapped_waypoint)
        throw std::invalid_argument("regions '" + regions[i].label +
                                    "' and '" + regions[j].label +
                                    "' snap to the same waypoint");

  MotionFts fts;
  fts.regions = std::move(regions);
  fts.initial = initial;
  for (int s = 0; s < n; ++s) {
    for (int f = 0; f < n; ++f) {
      if (s == f) continue;
      std::set<int> excluded;
      for (int o = 0; o < n; ++o)
        if (o != s && o != f) excluded.insert(fts.regions[o].snapped_waypoint);
      auto path = geom::shortest_path(r, fts.regions[s].snapped_waypoint,
                                      fts.regions[f].snapped_waypoint,
                                      excluded);
      if (!path) continue;
      MotionTransition t;
      t.from = s;
      t.to = f;
      t.duration = geom::travel_time(r, *path, v_ref, omega_ref);
      t.path = std::move(*path);
      fts.transitions.push_back(std::move(t));
    }
  }

  // every region must be reachable from the initial one
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  seen[initial] = 1;
  q.push(initial);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (const MotionTransition& t : fts.transitions)
      if (t.from == u && !seen[t.to]) {
        seen[t.to] = 1;
        q.push(t.to);
      }
  }
  for (int i = 0; i < n; ++i)
    if (!seen[i])
      throw std::runtime_error("region '" + fts.regions[i].label +
                               "' unreachable from the initial region");
  return fts;
}

std::set<std::string> RobotModel::label(int state) const {
  return {fts.regions[region_of(state)].label,
          actions[action_of(state)].label};
}

RobotModel compose_robot_model(MotionFts fts,
                               std::vector<ActionSpec> actions) {
  int idle = -1;
  for (size_t k = 0; k < actions.size(); ++k) {
    if (!actions[k].idle) continue;
    if (idle >= 0) throw std::invalid_argument("multiple idle actions");
    if (actions[k].data_units != 0)
      throw std::invalid_argument("idle action must gather no data");
    idle = static_cast<int>(k);
  }
  if (idle < 0) throw std::invalid_argument("an idle action is required");

  RobotModel m;
  m.fts = std::move(fts);
  m.actions = std::move(actions);
  m.idle_action = idle;
  m.initial_state = m.state_id(m.fts.initial, idle);

  const int nr = static_cast<int>(m.fts.regions.size());
  const int na = static_cast<int>(m.actions.size());
  m.outgoing.resize(static_cast<size_t>(nr) * na);

  auto add = [&](int from, int to, double duration, int motion) {
    m.outgoing[from].push_back(static_cast<int>(m.transitions.size()));
    m.transitions.push_back({from, to, duration, motion});
  };
  // (i) motion steps settle into the idle action
  for (size_t ti = 0; ti < m.fts.transitions.size(); ++ti) {
    const MotionTransition& t = m.fts.transitions[ti];
    for (int a = 0; a < na; ++a)
      add(m.state_id(t.from, a), m.state_id(t.to, idle),
          t.duration + m.actions[idle].duration, static_cast<int>(ti));
  }
  // (ii) in-place action switches (any ordered pair, self included)
  for (int reg = 0; reg < nr; ++reg)
    for (int a = 0; a < na; ++a)
      for (int b = 0; b < na; ++b)
        add(m.state_id(reg, a), m.state_id(reg, b), m.actions[b].duration, -1);
  return m;
}

}  // namespace ferry::agent
