#include "ferry/coord/meetings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ferry::coord {

namespace {

MeetReply scan_candidates(const MeetRequest& request, int relay_id,
                          int last_waypoint, double last_time,
                          const TravelOracle& travel, int center_waypoint,
                          int round_trips) {
  if (request.path.waypoints.empty())
    throw CoordError("empty request path");
  int best = -1;
  double best_cost = std::numeric_limits<double>::infinity();
  for (size_t s = 0; s < request.path.waypoints.size(); ++s) {
    const int m = request.path.waypoints[s];
    double cost = std::abs(last_time + travel(last_waypoint, m) -
                           request.path.times[s]);
    if (center_waypoint >= 0) cost += round_trips * travel(m, center_waypoint);
    if (cost < best_cost - 1e-12) {
      best_cost = cost;
      best = static_cast<int>(s);
    }
  }
  const double arrival =
      last_time +
      travel(last_waypoint,
             request.path.waypoints[static_cast<size_t>(best)]);
  return {relay_id, request.path.waypoints[static_cast<size_t>(best)],
          arrival};
}

}  // namespace

MeetReply next_meeting(const MeetRequest& request, int relay_id,
                       int last_waypoint, double last_time,
                       const TravelOracle& travel) {
  return scan_candidates(request, relay_id, last_waypoint, last_time, travel,
                         -1, 0);
}

MeetReply next_meeting_with_center(const MeetRequest& request, int relay_id,
                                   int last_waypoint, double last_time,
                                   int center_waypoint, int source_capacity,
                                   int relay_capacity,
                                   const TravelOracle& travel) {
  if (source_capacity <= 0 || relay_capacity <= 0)
    throw CoordError("capacities must be positive");
  const int trips =
      2 * ((source_capacity + relay_capacity - 1) / relay_capacity);
  return scan_candidates(request, relay_id, last_waypoint, last_time, travel,
                         center_waypoint, trips);
}

double total_waiting_time(const CommitmentList& meetings, int start_waypoint,
                          double start_time, const TravelOracle& travel) {
  double total = 0.0;
  int at = start_waypoint;
  double t = start_time;
  for (const Commitment& c : meetings) {
    total += std::abs(t + travel(at, c.waypoint) - c.time);
    at = c.waypoint;
    t = c.time;  // committed times anchor the chain, as in the scheduler
  }
  return total;
}

CommitmentList drop_peer(const CommitmentList& meetings, int peer) {
  CommitmentList out;
  for (const Commitment& c : meetings)
    if (c.peer != peer) out.push_back(c);
  return out;
}

SwapResult swap_meetings(const RelayPathState& a, const RelayPathState& b,
                         const TravelOracle& travel_a,
                         const TravelOracle& travel_b) {
  SwapResult res;
  res.a = a.meetings;
  res.b = b.meetings;
  res.wait_before =
      total_waiting_time(a.meetings, a.waypoint, a.time, travel_a) +
      total_waiting_time(b.meetings, b.waypoint, b.time, travel_b);

  // merge both relays' commitments into one time-ordered sequence
  CommitmentList merged = a.meetings;
  merged.insert(merged.end(), b.meetings.begin(), b.meetings.end());
  std::stable_sort(merged.begin(), merged.end(),
                   [](const Commitment& x, const Commitment& y) {
                     if (x.time != y.time) return x.time < y.time;
                     if (x.waypoint != y.waypoint)
                       return x.waypoint < y.waypoint;
                     return x.peer < y.peer;
                   });

  CommitmentList na, nb;
  int at_a = a.waypoint, at_b = b.waypoint;
  double t_a = a.time, t_b = b.time;
  double wait_a = 0.0, wait_b = 0.0;
  for (const Commitment& c : merged) {
    const double wa = std::abs(t_a + travel_a(at_a, c.waypoint) - c.time);
    const double wb = std::abs(t_b + travel_b(at_b, c.waypoint) - c.time);
    if (wa <= wb + 1e-12) {  // ties go to the first relay
      na.push_back(c);
      wait_a += wa;
      at_a = c.waypoint;
      t_a = c.time;
    } else {
      nb.push_back(c);
      wait_b += wb;
      at_b = c.waypoint;
      t_b = c.time;
    }
  }
  res.wait_after = wait_a + wait_b;
  if (res.wait_after < res.wait_before - 1e-9) {
    res.swapped = true;
    res.a = std::move(na);
    res.b = std::move(nb);
  } else {
    res.wait_after = res.wait_before;
  }
  return res;
}

}  // namespace ferry::coord
