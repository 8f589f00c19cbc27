#include "ferry/coord/window.hpp"

#include <algorithm>
#include <string>

namespace ferry::coord {

TravelOracle::TravelOracle(const geom::Roadmap& r, double v_ref,
                           double omega_ref)
    : roadmap_(&r), v_ref_(v_ref), omega_ref_(omega_ref) {}

const std::vector<int>& TravelOracle::path(int from, int to) const {
  auto it = cache_.find({from, to});
  if (it != cache_.end()) return it->second;
  auto p = geom::shortest_path(*roadmap_, from, to, {});
  if (!p)
    throw CoordError("waypoint " + std::to_string(to) +
                     " unreachable from waypoint " + std::to_string(from));
  return cache_.emplace(std::make_pair(from, to), std::move(*p))
      .first->second;
}

double TravelOracle::operator()(int from, int to) const {
  return geom::travel_time(*roadmap_, path(from, to), v_ref_, omega_ref_);
}

int UnrolledPlan::state_at(int k) const {
  const int np = static_cast<int>(prefix.size());
  if (k < np) return prefix[static_cast<size_t>(k)];
  return cycle[static_cast<size_t>((k - np) % static_cast<int>(cycle.size()))];
}

int UnrolledPlan::gather_at(int k) const {
  return model->actions[model->action_of(state_at(k))].data_units;
}

int UnrolledPlan::data_type_at(int k) const {
  return model->actions[model->action_of(state_at(k))].data_type;
}

int UnrolledPlan::region_waypoint_at(int k) const {
  return model->fts.regions[model->region_of(state_at(k))].snapped_waypoint;
}

const agent::RobotModel::Transition& UnrolledPlan::transition_at(int k) const {
  const int from = state_at(k), to = state_at(k + 1);
  for (int ti : model->outgoing[static_cast<size_t>(from)]) {
    const auto& t = model->transitions[static_cast<size_t>(ti)];
    if (t.to == to) return t;
  }
  throw CoordError("plan steps " + std::to_string(k) + " -> " +
                   std::to_string(k + 1) + " are not a model transition");
}

UnrolledPlan unroll_plan(const agent::RobotModel& m,
                         const plan::ProductAutomaton& p,
                         const plan::PrefixSuffixPlan& plan) {
  if (plan.prefix.empty() || plan.suffix.empty())
    throw CoordError("cannot unroll an empty plan");
  UnrolledPlan u;
  u.model = &m;
  for (int s : plan.prefix) u.prefix.push_back(p.model_state_of(s));
  for (size_t k = 1; k < plan.suffix.size(); ++k)
    u.cycle.push_back(p.model_state_of(plan.suffix[k]));
  u.cycle.push_back(p.model_state_of(plan.suffix.front()));
  return u;
}

MeetWindow compute_meet_window(const UnrolledPlan& plan, int k_t,
                               double depart_kt, int stored, int capacity,
                               int source_id, const geom::Roadmap& r,
                               double v_ref, double omega_ref) {
  if (k_t < 0 || stored < 0 || capacity <= 0)
    throw CoordError("invalid meet-window query");
  // cumulative units counting the action at k_t itself; `stored` is the
  // buffer content before that action
  int cum = stored + plan.gather_at(k_t);
  if (cum > capacity)
    throw CoordError("buffer budget already exceeded at the current state");
  const int np = static_cast<int>(plan.prefix.size());
  const int horizon =
      k_t + std::max(0, np - k_t) +
      static_cast<int>(plan.cycle.size()) * (capacity + 2);
  int k_e = -1;
  double depart = depart_kt;
  for (int k = k_t; k < horizon; ++k) {
    if (cum + plan.gather_at(k + 1) > capacity) {
      k_e = k;
      break;
    }
    cum += plan.gather_at(k + 1);
    depart += plan.transition_at(k).duration;
  }
  if (k_e < 0)
    throw CoordError("plan gathers no data: no meet window exists");

  MeetWindow w;
  w.k_e = k_e;
  w.request.source_id = source_id;
  const auto& t = plan.transition_at(k_e);
  if (t.motion >= 0) {
    const auto& route =
        plan.model->fts.transitions[static_cast<size_t>(t.motion)].path;
    w.request.path.waypoints = route;
    w.request.path.times =
        geom::path_timestamps(r, route, v_ref, omega_ref, depart);
  } else {
    w.request.path.waypoints = {plan.region_waypoint_at(k_e)};
    w.request.path.times = {depart};
  }
  w.resume_index = k_e + 1;
  w.resume_depart = depart + t.duration;
  return w;
}

}  // namespace ferry::coord
