#include "ferry/sim/engine.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "ferry/coord/meetings.hpp"
#include "ferry/plan/product.hpp"

namespace ferry::sim {

namespace {

constexpr double kEps = 1e-9;

struct SourcePlanning {
  agent::RobotModel model;
  plan::PrefixSuffixPlan plan;
  coord::UnrolledPlan unrolled;  // refers to `model`; keep heap-pinned
};

struct PlannedMeeting {
  coord::Commitment c;  // c.peer == -1 after a cancel (orphaned)
  int k_e = -1;
  int resume_index = -1;
  std::vector<int> path;  // request route region(k_e) -> region(k_e+1)
  size_t meet_pos = 0;    // index of c.waypoint within `path`
};

enum class Phase {
  ToState,      // navigating to the region of plan index k
  Act,          // running the action at k until busy_until
  ToMeeting,    // heading to a committed waypoint (or a parked relay)
  WaitMeeting,  // parked at the meeting waypoint
  InSession,
  Stranded,     // no commitment left; waiting for spontaneous contact
  RelayIdle,
  RelayGo,
  RelayWait,
  Follow,       // static-two group member outside its turn
};

struct Robot {
  scenario::RobotSpec spec;
  RobotKinematics kin;
  bool active = false;
  bool alive = true;
  bool leaving = false;
  agent::BufferLedger buffer{1};
  int waypoint = -1;

  std::vector<int> route;
  size_t route_pos = 0;

  Phase phase = Phase::RelayIdle;
  Phase saved_phase = Phase::RelayIdle;  // around spontaneous sessions
  double busy_until = 0.0;
  double wait_began = -1.0;
  bool in_session = false;

  // source planning state
  std::unique_ptr<SourcePlanning> planning;
  std::unique_ptr<coord::TravelOracle> travel;
  int k = 0;
  std::deque<PlannedMeeting> meetings;
  int cursor_k = 0;          // anchor of the next meet window
  double cursor_depart = 0.0;
  std::optional<coord::MeetWindow> window_cache;
  int window_cache_cursor = -1;
  std::vector<int> resume_route;  // continuation after the active meeting
  int resume_k = -1;
  int dump_relay = -1;  // static-one target

  std::vector<int> executed;
  std::vector<double> anchor_times;

  // relay state
  coord::CommitmentList commitments;

  geom::Vec2 follow_offset{0.0, 0.0};

  bool is_source() const { return spec.role == scenario::Role::Source; }
};

struct Session {
  int source = -1, relay = -1;
  bool committed = false;    // executes the source's front meeting
  bool dump = false;         // static-mode drop-off (no coordination)
  std::deque<int> batch_units;
  double next_batch = 0.0;
  double batch_period = 0.0;
};

class Engine {
 public:
  Engine(const scenario::Scenario& sc, Mode mode) : sc_(sc), mode_(mode) {}

  SimResult run();

 private:
  // --- setup -------------------------------------------------------------
  void setup();
  void setup_planning(Robot& r);
  void activate(Robot& r);

  // --- per-step phases ---------------------------------------------------
  void process_injections();
  void initial_coordination();
  void update_robot(Robot& r);
  void update_motion(Robot& r);
  void route_done(Robot& r);
  void begin_action(Robot& r);
  void finish_action(Robot& r);
  void state_done(Robot& r);
  void advance_to(Robot& r, int next_k);
  void head_to_meeting(Robot& r);
  void process_contacts();
  void try_committed_session(Robot& src);
  void try_spontaneous(Robot& src, Robot& rel);
  void try_swap(Robot& a, Robot& b);
  void process_sessions();
  void finish_session(Session& s);
  void handle_timeout(Robot& r);
  void handle_fault(Robot& r);
  void sample_metrics();

  // --- coordination helpers ---------------------------------------------
  const std::optional<coord::MeetWindow>& window_at_cursor(Robot& r);
  void commit_meeting(Robot& src, Robot& rel, const coord::MeetWindow& w,
                      bool emit_request);
  void reanchor_cursor(Robot& r);
  double estimate_depart(const Robot& r, int index) const;
  std::pair<int, double> relay_anchor(const Robot& rel) const;

  // --- small utilities ---------------------------------------------------
  Robot* find_robot(int id);
  bool in_range(const Robot& a, const Robot& b) const;
  void emit(int robot, const std::string& kind, nlohmann::json payload = {});
  nlohmann::json wait_payload(const Robot& r) const;
  void message(int from, int to, const std::string& type,
               nlohmann::json extra = {});
  void start_route(Robot& r, std::vector<int> route, Phase phase);
  void start_session(Robot& src, Robot& rel, bool committed, bool dump);
  void end_wait(Robot& r, bool record);
  double noisy_speed(Robot& r);
  int action_units(const Robot& r, int index) const;
  double action_duration(const Robot& r, int index) const;
  int region_wp(const Robot& r, int index) const;
  void assert_invariants();
  void rotate_turn();

  const scenario::Scenario& sc_;
  Mode mode_;
  geom::Roadmap roadmap_;
  int center_wp_ = -1;
  std::vector<Robot> robots_;
  std::map<int, Session> sessions_;  // keyed by source id
  std::set<std::pair<int, int>> was_in_range_;
  std::set<std::pair<int, int>> swap_tried_;
  std::vector<char> fault_done_, join_done_, leave_done_;
  std::mt19937 rng_;
  double now_ = 0.0;
  int turn_ = -1;       // static-two active source id
  double min_range_ = 0.0;
  SimResult out_;
};

// ---------------------------------------------------------------------------
// setup
// ---------------------------------------------------------------------------

void Engine::setup() {
  roadmap_ = geom::build_roadmap(sc_.workspace, sc_.roadmap);
  if (sc_.use_data_center) center_wp_ = roadmap_.snap(sc_.data_center);

  std::vector<scenario::RobotSpec> specs = sc_.robots;
  for (const auto& jn : sc_.joins) specs.push_back(jn.robot);
  for (size_t i = 0; i < specs.size(); ++i)
    if (specs[i].id != static_cast<int>(i))
      throw SimError("robot ids (including joins) must be dense and ascending");

  // per-seed velocity randomization, drawn in id order; the drawn factor
  // scales each robot's own reference so speed ratios within the team persist
  std::mt19937 vel_rng(sc_.sim.rng_seed ^ 0x9e3779b9u);
  for (auto& sp : specs) {
    if (sc_.v_lo < sc_.v_hi)
      sp.v_ref *= std::uniform_real_distribution<double>(sc_.v_lo,
                                                         sc_.v_hi)(vel_rng);
    if (sc_.omega_lo < sc_.omega_hi)
      sp.omega_ref *= std::uniform_real_distribution<double>(
          sc_.omega_lo, sc_.omega_hi)(vel_rng);
  }

  min_range_ = specs.front().range;
  for (const auto& sp : specs) min_range_ = std::min(min_range_, sp.range);

  robots_.resize(specs.size());
  for (size_t i = 0; i < specs.size(); ++i) {
    Robot& r = robots_[i];
    r.spec = specs[i];
    r.kin.position = r.spec.start;
    r.kin.heading = r.spec.heading;
    r.kin.v_ref = r.spec.v_ref;
    r.kin.omega_ref = r.spec.omega_ref;
    r.kin.range = r.spec.range;
    r.buffer = agent::BufferLedger(r.spec.capacity);
    r.waypoint = roadmap_.snap(r.kin.position);
    r.travel = std::make_unique<coord::TravelOracle>(roadmap_, r.spec.v_ref,
                                                     r.spec.omega_ref);
  }

  fault_done_.assign(sc_.faults.size(), 0);
  join_done_.assign(sc_.joins.size(), 0);
  leave_done_.assign(sc_.leaves.size(), 0);
  rng_.seed(sc_.sim.rng_seed);

  for (size_t i = 0; i < sc_.robots.size(); ++i) activate(robots_[i]);

  // the starting contact graph is handled by the initial coordination round;
  // spontaneous meetings only trigger on contacts formed later
  for (const auto& a : robots_)
    for (const auto& b : robots_)
      if (a.active && b.active && a.spec.id < b.spec.id && in_range(a, b))
        was_in_range_.insert({a.spec.id, b.spec.id});

  if (mode_ == Mode::StaticTwo) {
    // ring formation around the active source, inside half the min range
    const double radius = 0.25 * min_range_;
    int placed = 0;
    const int others = static_cast<int>(sc_.robots.size()) - 1;
    for (auto& r : robots_) {
      if (!r.active) continue;
      if (r.is_source() && turn_ < 0) {
        turn_ = r.spec.id;
        r.follow_offset = {0.0, 0.0};
        continue;
      }
      const double a =
          2.0 * std::numbers::pi * placed / std::max(1, others);
      r.follow_offset = {radius * std::cos(a), radius * std::sin(a)};
      ++placed;
    }
    for (auto& r : robots_) {
      if (!r.active || r.spec.id == turn_) continue;
      if (r.is_source()) r.phase = Phase::Follow;
      else r.phase = Phase::Follow;
    }
  }
}

void Engine::setup_planning(Robot& r) {
  // initial region: nearest region to the start pose
  int init = 0;
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < sc_.regions.size(); ++i) {
    const double d = (sc_.regions[i].point - r.spec.start).norm();
    if (d < best) {
      best = d;
      init = static_cast<int>(i);
    }
  }
  auto planning = std::make_unique<SourcePlanning>();
  planning->model = agent::compose_robot_model(
      agent::build_motion_fts(roadmap_, sc_.regions, r.spec.v_ref,
                              r.spec.omega_ref, init),
      sc_.actions);
  std::set<std::string> ap;
  for (const auto& reg : sc_.regions) ap.insert(reg.label);
  for (const auto& a : sc_.actions) ap.insert(a.label);
  const auto nba = ltl::translate_to_nba(ltl::parse_ltl(r.spec.task, ap));
  const auto product = plan::build_product(planning->model, nba);
  planning->plan = plan::synthesize_plan(product);
  planning->unrolled =
      coord::unroll_plan(planning->model, product, planning->plan);
  r.planning = std::move(planning);

  r.k = 0;
  r.cursor_k = 0;
  r.cursor_depart = estimate_depart(r, 0);
  r.window_cache_cursor = -1;

  // walk to the initial state's region, then start acting
  const int wp0 = region_wp(r, 0);
  auto route = r.travel->path(r.waypoint, wp0);
  start_route(r, route, Phase::ToState);
}

void Engine::activate(Robot& r) {
  r.active = true;
  if (r.is_source()) {
    setup_planning(r);
  } else {
    r.phase = Phase::RelayIdle;
  }
}

// ---------------------------------------------------------------------------
// utilities
// ---------------------------------------------------------------------------

Robot* Engine::find_robot(int id) {
  for (auto& r : robots_)
    if (r.spec.id == id) return &r;
  return nullptr;
}

bool Engine::in_range(const Robot& a, const Robot& b) const {
  return (a.kin.position - b.kin.position).norm() <=
         std::min(a.kin.range, b.kin.range) + kEps;
}

void Engine::emit(int robot, const std::string& kind,
                  nlohmann::json payload) {
  out_.events.push_back({now_, robot, kind, std::move(payload)});
}

nlohmann::json Engine::wait_payload(const Robot& r) const {
  nlohmann::json p{{"waypoint", r.waypoint}};
  // the waiting timeout counts from the agreed meeting time, so publish the
  // drop-dead instant and let trace audits hold the robot to it
  double agreed = -1.0;
  if (r.is_source() && !r.meetings.empty())
    agreed = r.meetings.front().c.time;
  else if (!r.is_source() && !r.commitments.empty())
    agreed = r.commitments.front().time;
  if (sc_.fault_policy_enabled && agreed >= 0.0)
    p["deadline"] = std::max(now_, agreed) + sc_.t_max;
  return p;
}

void Engine::message(int from, int to, const std::string& type,
                     nlohmann::json extra) {
  extra["type"] = type;
  extra["to"] = to;
  emit(from, "message", std::move(extra));
}

void Engine::start_route(Robot& r, std::vector<int> route, Phase phase) {
  if (route.empty()) route.push_back(r.waypoint);
  r.route = std::move(route);
  r.route_pos = 0;
  r.phase = phase;
}

double Engine::noisy_speed(Robot& r) {
  double v = r.spec.v_ref;
  if (sc_.sim.velocity_noise > 0) {
    std::normal_distribution<double> d(0.0, sc_.sim.velocity_noise);
    v *= 1.0 + d(rng_);
    v = std::max(v, 0.05 * r.spec.v_ref);
  }
  return v;
}

int Engine::action_units(const Robot& r, int index) const {
  return r.planning->unrolled.gather_at(index);
}

double Engine::action_duration(const Robot& r, int index) const {
  const auto& m = r.planning->model;
  return m.actions[static_cast<size_t>(
                       m.action_of(r.planning->unrolled.state_at(index)))]
      .duration;
}

int Engine::region_wp(const Robot& r, int index) const {
  return r.planning->unrolled.region_waypoint_at(index);
}

double Engine::estimate_depart(const Robot& r, int index) const {
  const geom::Vec2 target = roadmap_.waypoints[
      static_cast<size_t>(region_wp(r, index))];
  const double travel = (target - r.kin.position).norm() / r.spec.v_ref;
  return now_ + travel + action_duration(r, index);
}

void Engine::end_wait(Robot& r, bool record) {
  if (r.wait_began < 0) return;
  const double waited = now_ - r.wait_began;
  emit(r.spec.id, "wait_end", {{"duration", waited}});
  if (record) {
    out_.metrics.meeting_waits.push_back(waited);
    out_.total_wait += waited;
  }
  r.wait_began = -1.0;
}

// ---------------------------------------------------------------------------
// coordination helpers
// ---------------------------------------------------------------------------

const std::optional<coord::MeetWindow>& Engine::window_at_cursor(Robot& r) {
  if (r.window_cache_cursor != r.cursor_k) {
    r.window_cache.reset();
    try {
      r.window_cache = coord::compute_meet_window(
          r.planning->unrolled, r.cursor_k, r.cursor_depart, 0,
          r.spec.capacity, r.spec.id, roadmap_, r.spec.v_ref,
          r.spec.omega_ref);
    } catch (const coord::CoordError&) {
      // the plan never gathers: no meetings will ever be needed
    }
    r.window_cache_cursor = r.cursor_k;
  }
  return r.window_cache;
}

std::pair<int, double> Engine::relay_anchor(const Robot& rel) const {
  if (!rel.commitments.empty())
    return {rel.commitments.back().waypoint, rel.commitments.back().time};
  return {rel.waypoint, now_};
}

void Engine::commit_meeting(Robot& src, Robot& rel,
                            const coord::MeetWindow& w, bool emit_request) {
  if (emit_request)
    message(src.spec.id, rel.spec.id, "meet_request",
            {{"k_e", w.k_e}, {"path", w.request.path.waypoints}});
  const auto [awp, at] = relay_anchor(rel);
  const coord::MeetReply reply =
      center_wp_ >= 0
          ? coord::next_meeting_with_center(w.request, rel.spec.id, awp, at,
                                            center_wp_, src.spec.capacity,
                                            rel.spec.capacity, *rel.travel)
          : coord::next_meeting(w.request, rel.spec.id, awp, at, *rel.travel);
  message(rel.spec.id, src.spec.id, "meet_reply",
          {{"waypoint", reply.waypoint}, {"arrival", reply.time}});
  message(src.spec.id, rel.spec.id, "meet_confirm", {{"accepted", true}});

  double t_src = 0.0;
  size_t pos = 0;
  for (size_t i = 0; i < w.request.path.waypoints.size(); ++i)
    if (w.request.path.waypoints[i] == reply.waypoint) {
      t_src = w.request.path.times[i];
      pos = i;
      break;
    }
  // the agreed meeting time is when the later party can be there; both
  // sides measure their waiting timeout from it
  const double t_meet = std::max(t_src, reply.time);
  PlannedMeeting pm;
  pm.c = {rel.spec.id, reply.waypoint, t_meet};
  pm.k_e = w.k_e;
  pm.resume_index = w.resume_index;
  pm.path = w.request.path.waypoints;
  pm.meet_pos = pos;
  src.meetings.push_back(std::move(pm));
  rel.commitments.push_back({src.spec.id, reply.waypoint, t_meet});
  src.cursor_k = w.resume_index;
  src.cursor_depart = w.resume_depart;
  src.window_cache_cursor = -1;
}

void Engine::reanchor_cursor(Robot& r) {
  // delays reset at meetings: restart the estimate chain from wall time
  if (!r.meetings.empty()) return;
  r.cursor_depart = std::max(r.cursor_depart, estimate_depart(r, r.cursor_k));
  r.window_cache_cursor = -1;
}

// ---------------------------------------------------------------------------
// the step pipeline
// ---------------------------------------------------------------------------

SimResult Engine::run() {
  const auto t0 = std::chrono::steady_clock::now();
  setup();
  if (mode_ == Mode::Dynamic) initial_coordination();

  const double dt = sc_.sim.timestep;
  const int steps = static_cast<int>(std::llround(sc_.sim.horizon / dt));
  for (int step = 0; step <= steps; ++step) {
    now_ = step * dt;
    process_injections();
    for (auto& r : robots_) update_robot(r);
    process_contacts();
    process_sessions();
    assert_invariants();
    sample_metrics();
  }

  // final bookkeeping
  for (auto& r : robots_) {
    if (!r.is_source() || !r.planning) continue;
    SourceTrace tr;
    tr.robot_id = r.spec.id;
    tr.plan_prefix = r.planning->unrolled.prefix;
    tr.plan_cycle = r.planning->unrolled.cycle;
    tr.prefix_cost = r.planning->plan.prefix_cost;
    tr.suffix_cost = r.planning->plan.suffix_cost;
    tr.executed = r.executed;
    tr.anchor_times = r.anchor_times;
    out_.traces.push_back(std::move(tr));
  }
  for (const auto& [type, units] : out_.uploads_by_type)
    out_.total_uploads += units;
  out_.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out_;
}

void Engine::process_injections() {
  for (size_t i = 0; i < sc_.faults.size(); ++i) {
    if (fault_done_[i] || sc_.faults[i].time > now_ + kEps) continue;
    fault_done_[i] = 1;
    if (Robot* r = find_robot(sc_.faults[i].robot_id)) handle_fault(*r);
  }
  for (size_t i = 0; i < sc_.joins.size(); ++i) {
    if (join_done_[i] || sc_.joins[i].time > now_ + kEps) continue;
    join_done_[i] = 1;
    Robot* r = find_robot(sc_.joins[i].robot.id);
    if (!r) continue;
    if (r->is_source()) {
      bool ok = false;
      for (const auto& rel : robots_)
        if (!rel.is_source() && rel.active && rel.alive &&
            in_range(*r, rel))
          ok = true;
      if (!ok) {
        message(r->spec.id, -1, "join_rejected");
        continue;
      }
    }
    emit(r->spec.id, "join");
    activate(*r);
  }
  for (size_t i = 0; i < sc_.leaves.size(); ++i) {
    if (leave_done_[i] || sc_.leaves[i].time > now_ + kEps) continue;
    leave_done_[i] = 1;
    if (Robot* r = find_robot(sc_.leaves[i].robot_id)) {
      emit(r->spec.id, "leave");
      r->leaving = true;
    }
  }
  // a leaving relay departs once its last commitment is honored
  for (auto& r : robots_)
    if (r.leaving && r.active && !r.in_session &&
        ((r.is_source() && r.meetings.empty()) ||
         (!r.is_source() && r.commitments.empty())))
      r.active = false;
}

void Engine::initial_coordination() {
  // request -> schedule -> reply -> confirm, all during the connected start
  struct Offer {
    int relay;
    coord::MeetReply reply;
    coord::Commitment commitment;
  };
  std::map<int, std::vector<Offer>> offers;  // per source id
  for (auto& rel : robots_) {
    if (rel.is_source() || !rel.active) continue;
    coord::ScheduleInstance inst{rel.spec.id, rel.waypoint, 0.0, {}};
    std::vector<int> senders;
    for (auto& src : robots_) {
      if (!src.is_source() || !src.active || !in_range(src, rel)) continue;
      const auto& w = window_at_cursor(src);
      if (!w) continue;
      inst.requests.push_back(w->request);
      senders.push_back(src.spec.id);
      message(src.spec.id, rel.spec.id, "meet_request",
              {{"k_e", w->k_e}, {"path", w->request.path.waypoints}});
    }
    if (inst.requests.empty()) continue;
    const auto sched = coord::solve_initial_schedule(inst, *rel.travel);
    for (size_t i = 0; i < senders.size(); ++i) {
      const auto& m = *std::find_if(
          sched.meetings.begin(), sched.meetings.end(),
          [&](const coord::Commitment& c) { return c.peer == senders[i]; });
      offers[senders[i]].push_back({rel.spec.id, sched.replies[i], m});
      message(rel.spec.id, senders[i], "meet_reply",
              {{"waypoint", sched.replies[i].waypoint},
               {"arrival", sched.replies[i].time}});
    }
  }
  for (auto& src : robots_) {
    auto it = offers.find(src.spec.id);
    if (it == offers.end()) continue;
    std::vector<coord::MeetReply> replies;
    for (const auto& o : it->second) replies.push_back(o.reply);
    const auto confirms =
        coord::choose_relay(replies, window_at_cursor(src)->request);
    for (size_t i = 0; i < confirms.size(); ++i) {
      message(src.spec.id, it->second[i].relay, "meet_confirm",
              {{"accepted", confirms[i].accepted}});
      if (!confirms[i].accepted) continue;
      const auto& w = *window_at_cursor(src);
      const auto& cm = it->second[i].commitment;
      // the agreed time is when the later party can be at the waypoint
      const double t_meet = std::max(cm.time, it->second[i].reply.time);
      PlannedMeeting pm;
      pm.c = {it->second[i].relay, cm.waypoint, t_meet};
      pm.k_e = w.k_e;
      pm.resume_index = w.resume_index;
      pm.path = w.request.path.waypoints;
      for (size_t p = 0; p < pm.path.size(); ++p)
        if (pm.path[p] == cm.waypoint) pm.meet_pos = p;
      src.meetings.push_back(pm);
      Robot* rel = find_robot(it->second[i].relay);
      rel->commitments.push_back({src.spec.id, cm.waypoint, t_meet});
      src.cursor_k = w.resume_index;
      src.cursor_depart = w.resume_depart;
      src.window_cache_cursor = -1;
    }
  }
  // relays keep only confirmed meetings, preserving their schedule order
  for (auto& rel : robots_) {
    if (rel.is_source()) continue;
    coord::CommitmentList kept;
    for (const auto& c : rel.commitments) {
      Robot* src = find_robot(c.peer);
      bool confirmed = false;
      for (const auto& pm : src->meetings)
        if (pm.c.peer == rel.spec.id && pm.c.waypoint == c.waypoint &&
            pm.c.time == c.time)
          confirmed = true;
      if (confirmed) kept.push_back(c);
    }
    rel.commitments = std::move(kept);
  }
}

void Engine::update_robot(Robot& r) {
  if (!r.active || !r.alive || r.in_session) return;

  if (mode_ == Mode::StaticTwo && r.phase == Phase::Follow) {
    const Robot* leader = find_robot(turn_);
    if (leader) {
      r.kin.position = leader->kin.position + r.follow_offset;
      r.waypoint = leader->waypoint;
    }
    return;
  }

  switch (r.phase) {
    case Phase::ToState:
    case Phase::ToMeeting:
    case Phase::RelayGo:
      update_motion(r);
      break;
    case Phase::Act:
      if (now_ + kEps >= r.busy_until) finish_action(r);
      break;
    case Phase::WaitMeeting:
    case Phase::RelayWait: {
      // the timeout runs from the agreed meeting time, not from an early
      // arrival: showing up ahead of schedule is planned waiting
      double base = r.wait_began;
      if (r.is_source() && !r.meetings.empty())
        base = std::max(base, r.meetings.front().c.time);
      else if (!r.is_source() && !r.commitments.empty())
        base = std::max(base, r.commitments.front().time);
      if (sc_.fault_policy_enabled && r.wait_began >= 0 &&
          now_ - base > sc_.t_max + kEps)
        handle_timeout(r);
      break;
    }
    case Phase::RelayIdle:
      if (!r.is_source() && !r.commitments.empty() &&
          mode_ == Mode::Dynamic) {
        const int target = r.commitments.front().waypoint;
        if (r.waypoint == target &&
            (roadmap_.waypoints[static_cast<size_t>(target)] -
             r.kin.position).norm() <= sc_.sim.arrival_tolerance) {
          r.phase = Phase::RelayWait;
          r.wait_began = now_;
          emit(r.spec.id, "wait_start", wait_payload(r));
        } else {
          start_route(r, r.travel->path(r.waypoint, target), Phase::RelayGo);
        }
      }
      break;
    case Phase::Stranded:
    case Phase::InSession:
    case Phase::Follow:
      break;
  }
}

void Engine::update_motion(Robot& r) {
  if (r.route_pos >= r.route.size()) {
    route_done(r);
    return;
  }
  const int wp = r.route[r.route_pos];
  const geom::Vec2 target = roadmap_.waypoints[static_cast<size_t>(wp)];
  const bool arrived =
      step_unicycle(r.kin, target, sc_.sim.timestep, noisy_speed(r),
                    sc_.sim.angular_tolerance, sc_.sim.arrival_tolerance);
  if (arrived) {
    r.waypoint = wp;
    ++r.route_pos;
    if (r.route_pos >= r.route.size()) {
      emit(r.spec.id, "arrive", {{"waypoint", wp}});
      route_done(r);
    }
  }
}

void Engine::route_done(Robot& r) {
  switch (r.phase) {
    case Phase::ToState:
      begin_action(r);
      break;
    case Phase::ToMeeting:
      if (r.dump_relay >= 0) {
        // static-one drop-off: the parked relay is right here
        Robot* rel = find_robot(r.dump_relay);
        if (rel && rel->alive && in_range(r, *rel)) {
          start_session(r, *rel, false, true);
        } else {
          r.phase = Phase::WaitMeeting;
          r.wait_began = now_;
          emit(r.spec.id, "wait_start", wait_payload(r));
        }
      } else {
        r.phase = Phase::WaitMeeting;
        r.wait_began = now_;
        emit(r.spec.id, "wait_start", wait_payload(r));
      }
      break;
    case Phase::RelayGo:
      r.phase = Phase::RelayWait;
      r.wait_began = now_;
      emit(r.spec.id, "wait_start", wait_payload(r));
      break;
    default:
      break;
  }
}

void Engine::begin_action(Robot& r) {
  const double dur = action_duration(r, r.k);
  const int units = action_units(r, r.k);
  if (dur <= 0.0 && units == 0) {
    // idle actions complete instantly
    finish_action(r);
    return;
  }
  emit(r.spec.id, "gather_start",
       {{"index", r.k}, {"state", r.planning->unrolled.state_at(r.k)}});
  r.busy_until = now_ + dur;
  r.phase = Phase::Act;
}

void Engine::finish_action(Robot& r) {
  const int units = action_units(r, r.k);
  if (units > 0 || action_duration(r, r.k) > 0) {
    if (units > 0)
      agent::apply_gather(r.buffer,
                          r.planning->model.actions[static_cast<size_t>(
                              r.planning->model.action_of(
                                  r.planning->unrolled.state_at(r.k)))],
                          now_);
    emit(r.spec.id, "gather_end",
         {{"index", r.k}, {"units", units}, {"stored", r.buffer.stored()}});
  }
  r.executed.push_back(r.planning->unrolled.state_at(r.k));
  const int np = static_cast<int>(r.planning->unrolled.prefix.size());
  const int nc = static_cast<int>(r.planning->unrolled.cycle.size());
  if (r.k >= np - 1 && (r.k - (np - 1)) % nc == 0)
    r.anchor_times.push_back(now_);
  state_done(r);
}

void Engine::state_done(Robot& r) {
  if (!r.meetings.empty() && r.k == r.meetings.front().k_e) {
    head_to_meeting(r);
    return;
  }
  if (r.meetings.empty()) {
    const auto& w = window_at_cursor(r);
    const int stop = w ? w->k_e : INT_MAX;
    if (r.k >= stop) {
      if (mode_ == Mode::StaticOne) {
        // detour to the closest parked relay
        int best = -1;
        double best_t = std::numeric_limits<double>::infinity();
        for (const auto& rel : robots_) {
          if (rel.is_source() || !rel.active || !rel.alive) continue;
          const double t = (*r.travel)(r.waypoint, rel.waypoint);
          if (t < best_t) {
            best_t = t;
            best = rel.spec.id;
          }
        }
        if (best < 0) {
          r.phase = Phase::Stranded;
          return;
        }
        r.dump_relay = best;
        r.resume_k = w->resume_index;
        r.resume_route.clear();
        start_route(r, r.travel->path(r.waypoint,
                                      find_robot(best)->waypoint),
                    Phase::ToMeeting);
        return;
      }
      if (mode_ == Mode::StaticTwo) {
        for (auto& rel : robots_) {
          if (rel.is_source() || !rel.active || !rel.alive) continue;
          r.resume_k = w->resume_index;
          r.resume_route.clear();
          start_session(r, rel, false, true);
          return;
        }
        r.phase = Phase::Stranded;
        return;
      }
      // dynamic: nothing committed and the window is exhausted
      r.phase = Phase::Stranded;
      return;
    }
  }
  advance_to(r, r.k + 1);
}

void Engine::advance_to(Robot& r, int next_k) {
  const auto& t = r.planning->unrolled.transition_at(next_k - 1);
  r.k = next_k;
  if (t.motion >= 0) {
    const auto& route = r.planning->model.fts
                            .transitions[static_cast<size_t>(t.motion)].path;
    start_route(r, route, Phase::ToState);
  } else {
    begin_action(r);
  }
}

void Engine::head_to_meeting(Robot& r) {
  const PlannedMeeting& pm = r.meetings.front();
  std::vector<int> go(pm.path.begin(),
                      pm.path.begin() + static_cast<long>(pm.meet_pos) + 1);
  r.resume_route.assign(pm.path.begin() + static_cast<long>(pm.meet_pos),
                        pm.path.end());
  r.resume_k = pm.resume_index;
  r.dump_relay = -1;
  start_route(r, std::move(go), Phase::ToMeeting);
}

// ---------------------------------------------------------------------------
// contacts, sessions, and the protocol
// ---------------------------------------------------------------------------

void Engine::process_contacts() {
  if (mode_ != Mode::Dynamic) {
    // static modes do not run the meeting protocol
    was_in_range_.clear();
    return;
  }
  // committed meetings first, then spontaneous contacts, then relay swaps
  for (auto& src : robots_)
    if (src.is_source() && src.active && src.alive && !src.in_session &&
        src.phase == Phase::WaitMeeting && !src.meetings.empty())
      try_committed_session(src);

  // stranded or waiting sources grab any free relay that is already around
  // (level-triggered: their contact edge may long have passed)
  for (auto& src : robots_) {
    if (!src.is_source() || !src.active || !src.alive || src.in_session)
      continue;
    if (src.phase != Phase::Stranded && src.phase != Phase::WaitMeeting)
      continue;
    for (auto& rel : robots_) {
      if (rel.is_source() || !rel.active || !rel.alive || rel.in_session)
        continue;
      if (!in_range(src, rel)) continue;
      try_spontaneous(src, rel);
      if (src.in_session) break;
    }
  }

  std::set<std::pair<int, int>> current;
  for (auto& a : robots_) {
    if (!a.active || !a.alive) continue;
    for (auto& b : robots_) {
      if (b.spec.id <= a.spec.id || !b.active || !b.alive) continue;
      if (in_range(a, b)) current.insert({a.spec.id, b.spec.id});
    }
  }
  for (const auto& [ia, ib] : current) {
    if (was_in_range_.count({ia, ib})) continue;
    Robot* a = find_robot(ia);
    Robot* b = find_robot(ib);
    if (a->is_source() && !b->is_source()) try_spontaneous(*a, *b);
    else if (!a->is_source() && b->is_source()) try_spontaneous(*b, *a);
    else if (!a->is_source() && !b->is_source() && sc_.swap_enabled)
      try_swap(*a, *b);
  }
  // allow a fresh swap attempt once a pair separates
  for (auto it = swap_tried_.begin(); it != swap_tried_.end();)
    it = current.count(*it) ? std::next(it) : swap_tried_.erase(it);
  was_in_range_ = std::move(current);
}

void Engine::try_committed_session(Robot& src) {
  PlannedMeeting& pm = src.meetings.front();
  const geom::Vec2 mwp =
      roadmap_.waypoints[static_cast<size_t>(pm.c.waypoint)];
  if ((src.kin.position - mwp).norm() > sc_.sim.arrival_tolerance + kEps)
    return;
  for (auto& rel : robots_) {
    if (rel.is_source() || !rel.active || !rel.alive || rel.in_session)
      continue;
    if (!in_range(src, rel)) continue;
    bool match = false;
    if (pm.c.peer < 0) {
      match = true;  // orphaned meeting: any relay can take it over
    } else {
      for (const auto& c : rel.commitments)
        if (c.peer == src.spec.id && c.waypoint == pm.c.waypoint) match = true;
    }
    if (!match) continue;
    start_session(src, rel, true, false);
    return;
  }
}

void Engine::try_spontaneous(Robot& src, Robot& rel) {
  if (!src.is_source() || rel.is_source()) return;
  if (src.in_session || rel.in_session || rel.leaving) return;
  if (mode_ != Mode::Dynamic) return;
  if (!(src.phase == Phase::ToState || src.phase == Phase::Act ||
        src.phase == Phase::Stranded || src.phase == Phase::WaitMeeting))
    return;
  if (!(rel.phase == Phase::RelayIdle || rel.phase == Phase::RelayGo ||
        rel.phase == Phase::RelayWait))
    return;
  // skip relays that are already on this source's calendar
  for (const auto& c : rel.commitments)
    if (c.peer == src.spec.id) return;
  for (const auto& pm : src.meetings)
    if (pm.c.peer == rel.spec.id) return;
  // an empty-handed source with a meeting already lined up gains nothing
  if (src.buffer.stored() == 0 && !src.meetings.empty()) return;
  start_session(src, rel, false, false);
}

void Engine::try_swap(Robot& a, Robot& b) {
  if (a.in_session || b.in_session || a.leaving || b.leaving) return;
  const auto key = std::make_pair(std::min(a.spec.id, b.spec.id),
                                  std::max(a.spec.id, b.spec.id));
  if (swap_tried_.count(key)) return;
  swap_tried_.insert(key);
  if (a.commitments.empty() && b.commitments.empty()) return;
  coord::RelayPathState sa{a.spec.id, a.waypoint, now_, a.commitments};
  coord::RelayPathState sb{b.spec.id, b.waypoint, now_, b.commitments};
  const auto res = coord::swap_meetings(sa, sb, *a.travel, *b.travel);
  if (!res.swapped) return;
  message(a.spec.id, b.spec.id, "swap",
          {{"before", res.wait_before}, {"after", res.wait_after}});
  out_.metrics.swaps.push_back({res.wait_before, res.wait_after});
  a.commitments = res.a;
  b.commitments = res.b;
  for (Robot* r : {&a, &b}) {
    if (r->phase == Phase::RelayGo || r->phase == Phase::RelayWait) {
      if (r->phase == Phase::RelayWait) end_wait(*r, false);
      r->phase = Phase::RelayIdle;
      r->route.clear();
      r->route_pos = 0;
    }
  }
}

void Engine::start_session(Robot& src, Robot& rel, bool committed,
                           bool dump) {
  if (!in_range(src, rel))
    throw InvariantViolation("session started out of range");
  // close out any waiting periods
  if (src.phase == Phase::WaitMeeting) end_wait(src, true);
  if (rel.phase == Phase::RelayWait) end_wait(rel, true);

  src.saved_phase = src.phase;
  rel.saved_phase = rel.phase;
  src.phase = Phase::InSession;
  rel.phase = Phase::InSession;
  src.in_session = true;
  rel.in_session = true;

  Session s;
  s.source = src.spec.id;
  s.relay = rel.spec.id;
  s.committed = committed;
  s.dump = dump;
  int rem = src.buffer.stored();
  while (rem > 0) {
    const int batch = std::min(rem, rel.spec.capacity);
    s.batch_units.push_back(batch);
    rem -= batch;
  }
  s.batch_period = sc_.sim.transfer_duration + sc_.sim.upload_duration;
  if (center_wp_ >= 0 && !src.meetings.empty() && committed)
    s.batch_period += 2.0 * (*rel.travel)(src.waypoint, center_wp_);
  else if (center_wp_ >= 0)
    s.batch_period += 2.0 * (*rel.travel)(rel.waypoint, center_wp_);
  s.next_batch = now_ + s.batch_period;
  emit(src.spec.id, "meet_start",
       {{"peer", rel.spec.id},
        {"spontaneous", !committed && !dump},
        {"units", src.buffer.stored()}});
  emit(rel.spec.id, "meet_start",
       {{"peer", src.spec.id}, {"spontaneous", !committed && !dump}});
  sessions_[src.spec.id] = std::move(s);
}

void Engine::process_sessions() {
  std::vector<int> finished;
  for (auto& [sid, s] : sessions_) {
    Robot* src = find_robot(s.source);
    Robot* rel = find_robot(s.relay);
    while (!s.batch_units.empty() && s.next_batch <= now_ + kEps) {
      const int units = s.batch_units.front();
      s.batch_units.pop_front();
      if (!in_range(*src, *rel))
        throw InvariantViolation("transfer attempted out of range");
      agent::apply_transfer(src->buffer, rel->buffer, units, now_,
                            src->spec.id, rel->spec.id);
      emit(src->spec.id, "transfer",
           {{"units", units}, {"to", rel->spec.id}});
      const auto uploaded = agent::apply_upload(rel->buffer, units, now_, -1);
      for (const auto& b : uploaded) {
        out_.uploads_by_type[b.data_type] += b.units;
        emit(rel->spec.id, "upload", {{"units", b.units}, {"type", b.data_type}});
      }
      s.next_batch += s.batch_period;
    }
    if (s.batch_units.empty()) finished.push_back(sid);
  }
  for (int sid : finished) {
    Session s = sessions_[sid];
    sessions_.erase(sid);
    finish_session(s);
  }
}

void Engine::finish_session(Session& s) {
  Robot* src = find_robot(s.source);
  Robot* rel = find_robot(s.relay);
  emit(src->spec.id, "meet_end", {{"peer", rel->spec.id}});
  emit(rel->spec.id, "meet_end", {{"peer", src->spec.id}});
  src->in_session = false;
  rel->in_session = false;

  if (s.dump) {
    // static modes: resume the plan right after the drop-off
    const auto& w = window_at_cursor(*src);
    src->cursor_k = src->resume_k;
    src->cursor_depart = w ? w->resume_depart : 0.0;
    src->window_cache_cursor = -1;
    src->k = src->resume_k;
    src->dump_relay = -1;
    src->resume_k = -1;
    rel->phase = mode_ == Mode::StaticTwo ? Phase::Follow : Phase::RelayIdle;
    start_route(*src, src->travel->path(src->waypoint, region_wp(*src, src->k)),
                Phase::ToState);
    reanchor_cursor(*src);
    if (mode_ == Mode::StaticTwo) rotate_turn();
    return;
  }

  if (s.committed) {
    // retire the meeting on both sides
    src->meetings.pop_front();
    for (size_t i = 0; i < rel->commitments.size(); ++i)
      if (rel->commitments[i].peer == src->spec.id) {
        rel->commitments.erase(rel->commitments.begin() +
                               static_cast<long>(i));
        break;
      }
    rel->phase = Phase::RelayIdle;
    // coordinate the next meeting with the relay that is right here
    if (!src->leaving && !rel->leaving && src->alive && rel->alive) {
      reanchor_cursor(*src);
      const auto& w = window_at_cursor(*src);
      if (w) commit_meeting(*src, *rel, *w, true);
    }
    // continue along the rest of the planned route
    src->k = src->resume_k;
    src->resume_k = -1;
    start_route(*src, src->resume_route, Phase::ToState);
    src->resume_route.clear();
    return;
  }

  // spontaneous meeting: keep previous commitments, add one with this relay
  if (!src->leaving && !rel->leaving) {
    if (src->meetings.empty()) {
      // re-anchor the window chain at the source's current progress
      int anchor = src->k;
      if (src->saved_phase == Phase::Stranded)
        anchor = src->resume_k >= 0 ? src->resume_k : src->k + 1;
      else if (src->saved_phase == Phase::WaitMeeting && src->resume_k >= 0)
        anchor = src->resume_k;
      src->cursor_k = anchor;
      src->cursor_depart = estimate_depart(*src, anchor);
      src->window_cache_cursor = -1;
    }
    const auto& w = window_at_cursor(*src);
    if (w) commit_meeting(*src, *rel, *w, true);
  }
  rel->phase = rel->saved_phase == Phase::InSession ? Phase::RelayIdle
                                                    : rel->saved_phase;
  if (rel->phase == Phase::RelayWait) rel->wait_began = now_;
  if (src->saved_phase == Phase::Stranded) {
    if (src->resume_k >= 0) {
      // stranded at a meeting waypoint: follow the stored continuation
      src->k = src->resume_k;
      src->resume_k = -1;
      start_route(*src, src->resume_route, Phase::ToState);
      src->resume_route.clear();
    } else {
      advance_to(*src, src->k + 1);
    }
  } else if (src->saved_phase == Phase::WaitMeeting) {
    src->phase = Phase::WaitMeeting;
    src->wait_began = now_;
  } else {
    src->phase = src->saved_phase;
    // if an action timer ran during the session, just let it finish late
    if (src->phase == Phase::Act)
      src->busy_until = std::max(src->busy_until, now_);
  }
}

void Engine::handle_timeout(Robot& r) {
  end_wait(r, true);
  message(r.spec.id, -1, "cancel", {{"reason", "timeout"}});
  if (r.is_source()) {
    if (!r.meetings.empty()) r.meetings.pop_front();
    if (!r.meetings.empty()) {
      // head straight to the next committed meeting, gathering nothing
      PlannedMeeting& pm = r.meetings.front();
      r.resume_route.assign(pm.path.begin() +
                                static_cast<long>(pm.meet_pos),
                            pm.path.end());
      r.resume_k = pm.resume_index;
      r.dump_relay = -1;
      start_route(r, r.travel->path(r.waypoint, pm.c.waypoint),
                  Phase::ToMeeting);
    } else {
      r.phase = Phase::Stranded;  // resume_k keeps the stored continuation
    }
  } else {
    if (!r.commitments.empty())
      r.commitments.erase(r.commitments.begin());
    r.phase = Phase::RelayIdle;
    r.route.clear();
    r.route_pos = 0;
  }
}

void Engine::handle_fault(Robot& r) {
  r.alive = false;
  emit(r.spec.id, "fault");
  // abort any session in flight
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (it->second.source == r.spec.id || it->second.relay == r.spec.id) {
      Robot* other = find_robot(it->second.source == r.spec.id
                                    ? it->second.relay
                                    : it->second.source);
      other->in_session = false;
      other->phase = other->is_source() ? Phase::WaitMeeting
                                        : Phase::RelayIdle;
      if (other->is_source()) other->wait_began = now_;
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
  r.in_session = false;
  // in-range peers get cancel messages and drop the commitments
  for (auto& peer : robots_) {
    if (peer.spec.id == r.spec.id || !peer.active || !peer.alive) continue;
    if (!in_range(peer, r)) continue;
    bool had = false;
    if (peer.is_source()) {
      for (auto& pm : peer.meetings)
        if (pm.c.peer == r.spec.id) {
          pm.c.peer = -1;  // orphaned: wait there, then time out
          had = true;
        }
    } else {
      const size_t before = peer.commitments.size();
      peer.commitments = coord::drop_peer(peer.commitments, r.spec.id);
      had = peer.commitments.size() != before;
      if (had && (peer.phase == Phase::RelayGo ||
                  peer.phase == Phase::RelayWait)) {
        if (peer.phase == Phase::RelayWait) end_wait(peer, false);
        peer.phase = Phase::RelayIdle;
        peer.route.clear();
        peer.route_pos = 0;
      }
    }
    if (had) message(r.spec.id, peer.spec.id, "cancel", {{"reason", "fault"}});
  }
}

void Engine::rotate_turn() {
  std::vector<int> srcs;
  for (const auto& r : robots_)
    if (r.is_source() && r.active && r.alive) srcs.push_back(r.spec.id);
  if (srcs.empty()) return;
  auto it = std::upper_bound(srcs.begin(), srcs.end(), turn_);
  const int next = it == srcs.end() ? srcs.front() : *it;
  Robot* old_leader = find_robot(turn_);
  if (old_leader && old_leader->spec.id != next)
    old_leader->phase = Phase::Follow;
  turn_ = next;
  Robot* leader = find_robot(turn_);
  leader->follow_offset = {0.0, 0.0};
  leader->waypoint = roadmap_.snap(leader->kin.position);
  start_route(*leader,
              leader->travel->path(leader->waypoint,
                                   region_wp(*leader, leader->k)),
              Phase::ToState);
}

void Engine::assert_invariants() {
  for (const auto& r : robots_) {
    if (r.buffer.stored() < 0 || r.buffer.stored() > r.spec.capacity)
      throw InvariantViolation("buffer bound violated on robot " +
                               std::to_string(r.spec.id));
  }
  if (mode_ == Mode::StaticTwo) {
    std::vector<geom::Vec2> pos;
    std::vector<double> ranges;
    int count = 0;
    for (const auto& r : robots_) {
      if (!r.active || !r.alive) continue;
      pos.push_back(r.kin.position);
      ranges.push_back(r.kin.range);
      ++count;
    }
    const auto comps = connectivity_components(pos, ranges);
    if (!comps.empty() && comps.front() != count)
      throw InvariantViolation("static-two group lost connectivity");
  }
}

void Engine::sample_metrics() {
  MetricsRow row;
  row.time = now_;
  int max_type = 0;
  for (const auto& a : sc_.actions) max_type = std::max(max_type, a.data_type);
  row.uploads_by_type.assign(static_cast<size_t>(max_type) + 1, 0);
  for (const auto& [type, units] : out_.uploads_by_type)
    if (type >= 0 && type <= max_type)
      row.uploads_by_type[static_cast<size_t>(type)] = units;
  std::vector<geom::Vec2> pos;
  std::vector<double> ranges;
  for (const auto& r : robots_) {
    row.buffers.push_back(r.buffer.stored());
    if (r.active && r.alive) {
      pos.push_back(r.kin.position);
      ranges.push_back(r.kin.range);
    }
  }
  const auto comps = connectivity_components(pos, ranges);
  row.component_max = comps.empty() ? 0 : comps.front();
  out_.metrics.rows.push_back(std::move(row));
}

}  // namespace

SimResult run_simulation(const scenario::Scenario& s, Mode mode) {
  const auto errors = scenario::validate(s);
  if (!errors.empty()) {
    std::ostringstream msg;
    msg << "scenario invalid:";
    for (const auto& e : errors) msg << "\n  - " << e;
    throw SimError(msg.str());
  }
  Engine engine(s, mode);
  return engine.run();
}

}  // namespace ferry::sim
