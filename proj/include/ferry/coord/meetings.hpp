// ============================================================================
// coord/meetings.hpp — next-meeting selection, the fixed-data-center
// variant, and the relay-pair meeting swap
// ============================================================================
#pragma once

#include "ferry/coord/schedule.hpp"

namespace ferry::coord {

struct FaultPolicy {
  double t_max = 30.0;  // maximum waiting time at a meeting waypoint
  bool enabled = true;
};

/// Pick the waypoint on the request path minimizing the source's expected
/// wait |last_time + travel(last_waypoint → m) − t_m|, scanning every
/// candidate; ties go to the earliest path index.  (last_waypoint,
/// last_time) is the relay's final committed meeting, or its current pose
/// when it has none.
MeetReply next_meeting(const MeetRequest& request, int relay_id,
                       int last_waypoint, double last_time,
                       const TravelOracle& travel);

/// As next_meeting, but each candidate's cost adds the round trips the relay
/// must make to a fixed data center to drain the source's buffer:
/// 2·⌈source_capacity / relay_capacity⌉ · travel(m → center).
MeetReply next_meeting_with_center(const MeetRequest& request, int relay_id,
                                   int last_waypoint, double last_time,
                                   int center_waypoint, int source_capacity,
                                   int relay_capacity,
                                   const TravelOracle& travel);

/// A relay's position and remaining committed meetings, as exchanged when
/// two relays are in range.
struct RelayPathState {
  int id = -1;
  int waypoint = -1;   // current (or last reached) waypoint
  double time = 0.0;   // now
  CommitmentList meetings;  // time-ordered
};

struct SwapResult {
  bool swapped = false;
  CommitmentList a, b;  // reassigned meeting lists (originals if !swapped)
  double wait_before = 0.0, wait_after = 0.0;
};

/// Greedy reassignment over the time-merged meeting sequence: each meeting
/// goes to whichever relay would wait less given its last assignment; the
/// result is adopted only when the total waiting time strictly decreases.
/// The committed-meeting multiset is preserved either way.
SwapResult swap_meetings(const RelayPathState& a, const RelayPathState& b,
                         const TravelOracle& travel_a,
                         const TravelOracle& travel_b);

/// Total chained waiting time of a committed sequence from a start pose,
/// using the same cost convention as the scheduler.
double total_waiting_time(const CommitmentList& meetings, int start_waypoint,
                          double start_time, const TravelOracle& travel);

/// Remove every commitment with the given peer (cancel-message handling).
CommitmentList drop_peer(const CommitmentList& meetings, int peer);

}  // namespace ferry::coord
