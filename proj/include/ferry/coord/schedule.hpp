// ============================================================================
// coord/schedule.hpp — the relay's initial meeting schedule and the source's
// relay selection
//
// Given the meeting requests of all connected sources, a relay picks one
// waypoint per request and a visiting order minimizing the summed waiting
// time.  Solved exactly by dynamic programming over (visited subset, last
// source, last candidate), equivalent to the path-TSP integer program the
// instance defines.
// ============================================================================
#pragma once

#include "ferry/coord/window.hpp"

namespace ferry::coord {

struct MeetReply {
  int relay_id = -1;
  int waypoint = -1;   // chosen waypoint on the request path
  double time = 0.0;   // relay's estimated arrival there
};

struct MeetConfirm {
  int source_id = -1;
  int relay_id = -1;
  bool accepted = false;
};

/// One committed meeting from a relay's point of view.
struct Commitment {
  int peer = -1;       // the other robot
  int waypoint = -1;
  double time = 0.0;   // agreed meeting time (the source's timestamp)

  bool operator==(const Commitment&) const = default;
};
using CommitmentList = std::vector<Commitment>;

struct ScheduleInstance {
  int relay_id = -1;
  int start_waypoint = -1;
  double start_time = 0.0;
  std::vector<MeetRequest> requests;
};

struct RelaySchedule {
  std::vector<MeetReply> replies;  // aligned with the instance's requests
  CommitmentList meetings;         // chosen waypoints in visiting order
  TimedPath path;                  // full waypoint route with relay times
  double total_wait = 0.0;         // optimal objective value
};

/// Exact minimum-total-waiting-time schedule.  The chained cost between
/// consecutive meetings is |t_prev + travel(m_prev → m_next) − t_next| with
/// the requests' own timestamps; the first leg starts from the relay's
/// current waypoint and time.  Throws CoordError on empty instances or
/// unreachable waypoints.
RelaySchedule solve_initial_schedule(const ScheduleInstance& inst,
                                     const TravelOracle& travel);

/// Accept exactly the reply with minimum |arrival − source time at that
/// waypoint|; ties go to the lowest relay id.  Throws CoordError when a
/// reply's waypoint is not on the request path.
std::vector<MeetConfirm> choose_relay(const std::vector<MeetReply>& replies,
                                      const MeetRequest& request);

}  // namespace ferry::coord
