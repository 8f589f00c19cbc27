#include "ferry/coord/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ferry::coord {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

RelaySchedule solve_initial_schedule(const ScheduleInstance& inst,
                                     const TravelOracle& travel) {
  const int n = static_cast<int>(inst.requests.size());
  if (n == 0) throw CoordError("schedule instance has no requests");
  for (const MeetRequest& req : inst.requests)
    if (req.path.waypoints.empty() ||
        req.path.waypoints.size() != req.path.times.size())
      throw CoordError("malformed request path");

  // dp over (visited subset, last request, last candidate index)
  std::vector<std::vector<std::vector<double>>> dp(
      static_cast<size_t>(1) << n);
  std::vector<std::vector<std::vector<std::pair<int, int>>>> par(
      static_cast<size_t>(1) << n);
  for (int mask = 0; mask < (1 << n); ++mask) {
    dp[static_cast<size_t>(mask)].resize(static_cast<size_t>(n));
    par[static_cast<size_t>(mask)].resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      const size_t c = inst.requests[static_cast<size_t>(i)].path.waypoints.size();
      dp[static_cast<size_t>(mask)][static_cast<size_t>(i)].assign(c, kInf);
      par[static_cast<size_t>(mask)][static_cast<size_t>(i)].assign(c,
                                                                    {-1, -1});
    }
  }
  auto wp = [&](int i, int k) {
    return inst.requests[static_cast<size_t>(i)]
        .path.waypoints[static_cast<size_t>(k)];
  };
  auto tm = [&](int i, int k) {
    return inst.requests[static_cast<size_t>(i)]
        .path.times[static_cast<size_t>(k)];
  };
  for (int i = 0; i < n; ++i)
    for (size_t k = 0; k < inst.requests[static_cast<size_t>(i)]
                               .path.waypoints.size();
         ++k)
      dp[static_cast<size_t>(1 << i)][static_cast<size_t>(i)][k] = std::abs(
          inst.start_time +
          travel(inst.start_waypoint, wp(i, static_cast<int>(k))) -
          tm(i, static_cast<int>(k)));

  for (int mask = 1; mask < (1 << n); ++mask)
    for (int i = 0; i < n; ++i) {
      if (!(mask & (1 << i))) continue;
      const auto& cur = dp[static_cast<size_t>(mask)][static_cast<size_t>(i)];
      for (size_t k = 0; k < cur.size(); ++k) {
        if (cur[k] == kInf) continue;
        for (int h = 0; h < n; ++h) {
          if (mask & (1 << h)) continue;
          const int nm = mask | (1 << h);
          auto& nxt = dp[static_cast<size_t>(nm)][static_cast<size_t>(h)];
          for (size_t k2 = 0; k2 < nxt.size(); ++k2) {
            const double cost =
                cur[k] +
                std::abs(tm(i, static_cast<int>(k)) +
                         travel(wp(i, static_cast<int>(k)),
                                wp(h, static_cast<int>(k2))) -
                         tm(h, static_cast<int>(k2)));
            if (cost < nxt[k2] - 1e-12) {
              nxt[k2] = cost;
              par[static_cast<size_t>(nm)][static_cast<size_t>(h)][k2] = {
                  i, static_cast<int>(k)};
            }
          }
        }
      }
    }

  // best endpoint over the full subset
  const int full = (1 << n) - 1;
  double best = kInf;
  int bi = -1, bk = -1;
  for (int i = 0; i < n; ++i) {
    const auto& row = dp[static_cast<size_t>(full)][static_cast<size_t>(i)];
    for (size_t k = 0; k < row.size(); ++k)
      if (row[k] < best - 1e-12) {
        best = row[k];
        bi = i;
        bk = static_cast<int>(k);
      }
  }
  if (bi < 0) throw CoordError("schedule instance is infeasible");

  // reconstruct the visiting order
  std::vector<std::pair<int, int>> order;  // (request index, candidate index)
  int mask = full, i = bi, k = bk;
  while (i >= 0) {
    order.push_back({i, k});
    const auto [pi, pk] =
        par[static_cast<size_t>(mask)][static_cast<size_t>(i)][
            static_cast<size_t>(k)];
    mask &= ~(1 << i);
    i = pi;
    k = pk;
  }
  std::reverse(order.begin(), order.end());

  RelaySchedule out;
  out.total_wait = best;
  out.replies.resize(static_cast<size_t>(n));
  out.path.waypoints = {inst.start_waypoint};
  out.path.times = {inst.start_time};
  int at = inst.start_waypoint;
  double now = inst.start_time;
  for (const auto& [ri, rk] : order) {
    const int m = wp(ri, rk);
    const double t_src = tm(ri, rk);
    const auto& leg = travel.path(at, m);
    auto stamps = geom::path_timestamps(travel.roadmap(), leg, travel.v_ref(),
                                        travel.omega_ref(), now);
    for (size_t s = 1; s < leg.size(); ++s) {
      out.path.waypoints.push_back(leg[s]);
      out.path.times.push_back(stamps[s]);
    }
    const double arrival = now + travel(at, m);
    out.replies[static_cast<size_t>(ri)] = {inst.relay_id, m, arrival};
    out.meetings.push_back(
        {inst.requests[static_cast<size_t>(ri)].source_id, m, t_src});
    // the relay leaves once the meeting has happened
    now = std::max(arrival, t_src);
    if (!out.path.times.empty() && now > out.path.times.back())
      out.path.times.back() = now;
    at = m;
  }
  return out;
}

std::vector<MeetConfirm> choose_relay(const std::vector<MeetReply>& replies,
                                      const MeetRequest& request) {
  if (replies.empty()) throw CoordError("no replies to choose from");
  auto source_time = [&](int waypoint) {
    for (size_t k = 0; k < request.path.waypoints.size(); ++k)
      if (request.path.waypoints[k] == waypoint) return request.path.times[k];
    throw CoordError("reply waypoint " + std::to_string(waypoint) +
                     " is not on the request path");
  };
  int best = -1;
  double best_wait = kInf;
  for (size_t r = 0; r < replies.size(); ++r) {
    const double wait =
        std::abs(replies[r].time - source_time(replies[r].waypoint));
    const bool better =
        wait < best_wait - 1e-12 ||
        (wait < best_wait + 1e-12 && best >= 0 &&
         replies[r].relay_id < replies[static_cast<size_t>(best)].relay_id);
    if (best < 0 || better) {
      best = static_cast<int>(r);
      best_wait = wait;
    }
  }
  std::vector<MeetConfirm> confirms;
  for (size_t r = 0; r < replies.size(); ++r)
    confirms.push_back({request.source_id, replies[r].relay_id,
                        static_cast<int>(r) == best});
  return confirms;
}

}  // namespace ferry::coord
