#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "ferry/baselines/baselines.hpp"
#include "ferry/coord/window.hpp"
#include "ferry/geom/roadmap.hpp"

namespace ferry::baselines {

namespace {

std::string format_estimate(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

// Rewrite every proposition `p` as `prefix + p` so that each source's task
// speaks about that source only once the team is composed.
ltl::FormulaPtr namespace_props(const ltl::FormulaPtr& f,
                                const std::string& prefix) {
  using namespace ltl;
  switch (f->op) {
    case Op::True:
    case Op::False:
      return f;
    case Op::Prop:
      return make_prop(prefix + f->prop);
    case Op::Not:
      return make_not(namespace_props(f->lhs, prefix));
    case Op::Next:
      return make_next(namespace_props(f->lhs, prefix));
    case Op::Eventually:
      return make_eventually(namespace_props(f->lhs, prefix));
    case Op::Always:
      return make_always(namespace_props(f->lhs, prefix));
    case Op::And:
      return make_and(namespace_props(f->lhs, prefix),
                      namespace_props(f->rhs, prefix));
    case Op::Or:
      return make_or(namespace_props(f->lhs, prefix),
                     namespace_props(f->rhs, prefix));
    case Op::Implies:
      return make_implies(namespace_props(f->lhs, prefix),
                          namespace_props(f->rhs, prefix));
    case Op::Until:
      return make_until(namespace_props(f->lhs, prefix),
                        namespace_props(f->rhs, prefix));
    case Op::Release:
      return make_release(namespace_props(f->lhs, prefix),
                          namespace_props(f->rhs, prefix));
  }
  throw BaselinesError("unhandled formula operator");
}

// Per-robot ingredients shared by the estimate and the joint construction.
struct Prep {
  geom::Roadmap roadmap;
  std::vector<ComposedSystem::SourceComponent> sources;
  std::vector<ComposedSystem::RelayComponent> relays;
  std::vector<int> relay_waypoints;
  std::vector<ltl::FormulaPtr> tasks;  // namespaced, aligned with sources
  double estimate = 1.0;
};

Prep prepare(const scenario::Scenario& s) {
  Prep p;
  p.roadmap = geom::build_roadmap(s.workspace, s.roadmap);

  std::set<std::string> alphabet;
  for (const auto& r : s.regions) alphabet.insert(r.label);
  for (const auto& a : s.actions) alphabet.insert(a.label);

  std::vector<std::pair<int, int>> relay_start_wps;  // (robot id, waypoint)
  for (const auto& spec : s.robots) {
    if (spec.role == scenario::Role::Relay) {
      relay_start_wps.emplace_back(spec.id, p.roadmap.snap(spec.start));
      continue;
    }
    const auto task = ltl::parse_ltl(spec.task, alphabet);
    const auto props = ltl::propositions(task);

    // the joint planner only ever schedules actions the task asks for, so
    // drop the rest of the shared action set before composing
    std::vector<agent::ActionSpec> actions;
    for (const auto& a : s.actions)
      if (a.idle || props.count(a.label)) actions.push_back(a);

    int init = 0;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < s.regions.size(); ++i) {
      const double d = (s.regions[i].point - spec.start).norm();
      if (d < best) {
        best = d;
        init = static_cast<int>(i);
      }
    }

    ComposedSystem::SourceComponent sc;
    sc.robot_id = spec.id;
    sc.capacity = spec.capacity;
    sc.prefix = "s" + std::to_string(spec.id) + "_";
    sc.model = agent::compose_robot_model(
        agent::build_motion_fts(p.roadmap, s.regions, spec.v_ref,
                                spec.omega_ref, init),
        std::move(actions));
    p.tasks.push_back(namespace_props(task, sc.prefix));
    p.sources.push_back(std::move(sc));
  }
  if (p.sources.empty())
    throw BaselinesError("centralized planning needs at least one source");

  // candidate relay parking spots: every region waypoint plus every relay's
  // deployment waypoint
  std::set<int> wps;
  for (const auto& r : p.sources.front().model.fts.regions)
    wps.insert(r.snapped_waypoint);
  for (const auto& [id, wp] : relay_start_wps) wps.insert(wp);
  p.relay_waypoints.assign(wps.begin(), wps.end());

  for (const auto& spec : s.robots) {
    if (spec.role != scenario::Role::Relay) continue;
    ComposedSystem::RelayComponent rc;
    rc.robot_id = spec.id;
    rc.capacity = spec.capacity;
    const int start_wp = p.roadmap.snap(spec.start);
    rc.start_index = static_cast<int>(
        std::lower_bound(p.relay_waypoints.begin(), p.relay_waypoints.end(),
                         start_wp) -
        p.relay_waypoints.begin());
    coord::TravelOracle travel(p.roadmap, spec.v_ref, spec.omega_ref);
    const int W = static_cast<int>(p.relay_waypoints.size());
    rc.travel.assign(W, std::vector<double>(W, 0.0));
    for (int i = 0; i < W; ++i)
      for (int j = 0; j < W; ++j)
        if (i != j)
          rc.travel[i][j] = travel(p.relay_waypoints[i], p.relay_waypoints[j]);
    p.relays.push_back(std::move(rc));
  }

  for (const auto& sc : p.sources)
    p.estimate *= double(sc.model.num_states()) * double(sc.capacity + 1);
  for (const auto& rc : p.relays)
    p.estimate *= double(p.relay_waypoints.size()) * double(rc.capacity + 1);
  return p;
}

// One robot's options at a joint state.
struct LocalMove {
  int state = 0;        // successor model state / waypoint index
  int buffer = 0;       // successor buffer (pre-handover)
  double duration = 0.0;
  bool stay = false;
};

ltl::Letter joint_label(const ComposedSystem& cs, const std::vector<int>& st) {
  ltl::Letter letter;
  for (size_t i = 0; i < cs.sources.size(); ++i) {
    const auto& sc = cs.sources[i];
    for (const auto& prop : sc.model.label(st[2 * i]))
      letter.insert(sc.prefix + prop);
  }
  return letter;
}

ComposedSystem explore(Prep prep, double state_bound) {
  ComposedSystem cs;
  cs.sources = std::move(prep.sources);
  cs.relays = std::move(prep.relays);
  cs.relay_waypoints = std::move(prep.relay_waypoints);
  cs.estimated_states = prep.estimate;

  const int ns = cs.num_sources();
  const int nr = static_cast<int>(cs.relays.size());
  const int n = ns + nr;

  std::vector<int> init(2 * n);
  for (int i = 0; i < ns; ++i) {
    init[2 * i] = cs.sources[i].model.initial_state;
    init[2 * i + 1] = 0;
  }
  for (int j = 0; j < nr; ++j) {
    init[2 * ns + 2 * j] = cs.relays[j].start_index;
    init[2 * ns + 2 * j + 1] = 0;
  }

  std::map<std::vector<int>, int> index;
  index.emplace(init, 0);
  cs.states.push_back(init);
  cs.labels.push_back(joint_label(cs, init));
  cs.initial_state = 0;
  cs.outgoing.emplace_back();

  std::vector<std::vector<LocalMove>> options(n);
  std::vector<int> choice(n, 0);
  std::vector<int> succ(2 * n);

  for (int u = 0; u < static_cast<int>(cs.states.size()); ++u) {
    const std::vector<int> st = cs.states[u];

    for (int i = 0; i < ns; ++i) {
      auto& opts = options[i];
      opts.clear();
      const auto& m = cs.sources[i].model;
      const int ms = st[2 * i], buf = st[2 * i + 1];
      for (int ti : m.outgoing[ms]) {
        const auto& t = m.transitions[ti];
        if (t.to == ms) continue;  // the idle self-loop is the stay below
        const int gained = m.actions[m.action_of(t.to)].data_units;
        if (buf + gained > cs.sources[i].capacity) continue;  // would overflow
        opts.push_back({t.to, buf + gained, t.duration, false});
      }
      // a source may hold position only while idling; mid-action loitering
      // has no physical meaning
      if (m.actions[m.action_of(ms)].idle) opts.push_back({ms, buf, 0.0, true});
    }
    for (int j = 0; j < nr; ++j) {
      auto& opts = options[ns + j];
      opts.clear();
      const int w = st[2 * ns + 2 * j];
      opts.push_back({w, 0, 0.0, true});
      for (int w2 = 0; w2 < static_cast<int>(cs.relay_waypoints.size()); ++w2)
        if (w2 != w) opts.push_back({w2, 0, cs.relays[j].travel[w][w2], false});
    }

    // best (cheapest) joint step per successor state
    std::map<int, double> best;
    std::map<int, std::vector<int>> fresh;  // successors not yet indexed
    std::vector<std::pair<std::vector<int>, double>> pending;

    const std::function<void(int, double, bool)> enumerate =
        [&](int r, double dur, bool moved) {
          if (r == n) {
            if (!moved) return;  // someone must act
            for (int i = 0; i < ns; ++i) {
              succ[2 * i] = options[i][choice[i]].state;
              succ[2 * i + 1] = options[i][choice[i]].buffer;
            }
            for (int j = 0; j < nr; ++j) {
              succ[2 * ns + 2 * j] = options[ns + j][choice[ns + j]].state;
              succ[2 * ns + 2 * j + 1] = 0;
            }
            // handover: a source that ends the step on a relay's waypoint
            // dumps to the lowest-id such relay; the relay uploads at once
            for (int i = 0; i < ns; ++i) {
              int& stored = succ[2 * i + 1];
              if (stored == 0) continue;
              const auto& m = cs.sources[i].model;
              const int wp =
                  m.fts.regions[m.region_of(succ[2 * i])].snapped_waypoint;
              for (int j = 0; j < nr; ++j) {
                if (cs.relay_waypoints[succ[2 * ns + 2 * j]] != wp) continue;
                stored -= std::min(stored, cs.relays[j].capacity);
                break;
              }
            }
            pending.emplace_back(succ, dur);
            return;
          }
          for (int c = 0; c < static_cast<int>(options[r].size()); ++c) {
            choice[r] = c;
            enumerate(r + 1, std::max(dur, options[r][c].duration),
                      moved || !options[r][c].stay);
          }
        };
    enumerate(0, 0.0, false);

    for (auto& [state, dur] : pending) {
      auto [it, inserted] =
          index.emplace(state, static_cast<int>(cs.states.size()));
      if (inserted) {
        if (double(cs.states.size()) + 1.0 > state_bound)
          throw StateSpaceBound(cs.estimated_states, state_bound);
        cs.states.push_back(state);
        cs.labels.push_back(joint_label(cs, state));
        cs.outgoing.emplace_back();
      }
      auto [bit, fresh_edge] = best.emplace(it->second, dur);
      if (!fresh_edge) bit->second = std::min(bit->second, dur);
    }
    for (const auto& [to, dur] : best) {
      cs.outgoing[u].push_back(static_cast<int>(cs.transitions.size()));
      cs.transitions.push_back({u, to, dur});
    }
  }
  return cs;
}

}  // namespace

StateSpaceBound::StateSpaceBound(double estimate, double b)
    : BaselinesError("joint state-space estimate " + format_estimate(estimate) +
                     " exceeds the bound " + format_estimate(b) +
                     "; centralized planning refused"),
      estimated_states(estimate),
      bound(b) {}

double estimate_joint_states(const scenario::Scenario& s) {
  return prepare(s).estimate;
}

ComposedSystem build_composed_system(const scenario::Scenario& s,
                                     double state_bound) {
  Prep p = prepare(s);
  if (p.estimate > state_bound)
    throw StateSpaceBound(p.estimate, state_bound);
  return explore(std::move(p), state_bound);
}

CentralizedPlan centralized_synthesize(const scenario::Scenario& s,
                                       double state_bound) {
  const auto t0 = std::chrono::steady_clock::now();

  Prep p = prepare(s);
  if (p.estimate > state_bound)
    throw StateSpaceBound(p.estimate, state_bound);
  std::vector<ltl::FormulaPtr> tasks = p.tasks;

  CentralizedPlan out;
  out.system = explore(std::move(p), state_bound);
  const ComposedSystem& cs = out.system;

  ltl::FormulaPtr conj = tasks.front();
  for (size_t i = 1; i < tasks.size(); ++i)
    conj = ltl::make_and(conj, tasks[i]);
  out.nba = ltl::translate_to_nba(conj);

  const int N = static_cast<int>(cs.states.size());
  const int Q = out.nba.num_states;
  const auto nba_out = out.nba.outgoing();

  plan::ProductAutomaton prod;
  prod.num_model_states = N;
  prod.num_nba_states = Q;
  prod.outgoing.resize(size_t(N) * Q);
  prod.accepting.assign(size_t(N) * Q, 0);
  for (int v = 0; v < N; ++v)
    for (int q : out.nba.accepting) prod.accepting[prod.state_id(v, q)] = 1;

  // the automaton consumes the label of the state a step lands in
  for (size_t e = 0; e < cs.transitions.size(); ++e) {
    const auto& jt = cs.transitions[e];
    const ltl::Letter& letter = cs.labels[jt.to];
    for (int q = 0; q < Q; ++q) {
      if (nba_out[q].empty()) continue;
      const int from = prod.state_id(jt.from, q);
      for (const auto* nt : nba_out[q]) {
        if (!nt->guard.matches(letter)) continue;
        prod.outgoing[from].push_back(static_cast<int>(prod.transitions.size()));
        prod.transitions.push_back({from, prod.state_id(jt.to, nt->to),
                                    jt.duration, static_cast<int>(e)});
      }
    }
  }
  // the run starts by consuming the initial joint state's label
  for (int q0 : out.nba.initial)
    for (const auto* nt : nba_out[q0])
      if (nt->guard.matches(cs.labels[cs.initial_state]))
        prod.initial.push_back(prod.state_id(cs.initial_state, nt->to));
  std::sort(prod.initial.begin(), prod.initial.end());
  prod.initial.erase(std::unique(prod.initial.begin(), prod.initial.end()),
                     prod.initial.end());
  if (prod.initial.empty())
    throw BaselinesError(
        "the task conjunction rejects the initial team configuration");

  try {
    out.product_plan = plan::synthesize_plan(prod);
  } catch (const plan::PlanError& e) {
    throw BaselinesError(std::string("centralized synthesis failed: ") +
                         e.what());
  }
  out.prefix_cost = out.product_plan.prefix_cost;
  out.suffix_cost = out.product_plan.suffix_cost;
  for (int ps : out.product_plan.prefix)
    out.prefix.push_back(prod.model_state_of(ps));
  for (int ps : out.product_plan.suffix)
    out.suffix.push_back(prod.model_state_of(ps));

  out.synthesis_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

}  // namespace ferry::baselines
