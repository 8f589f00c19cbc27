#include <algorithm>
#include <cmath>
#include <numbers>

#include "ferry/sim/types.hpp"

namespace ferry::sim {

double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

bool step_unicycle(RobotKinematics& state, const geom::Vec2& target, double dt,
                   double speed, double angular_tolerance,
                   double arrival_tolerance) {
  const geom::Vec2 delta = target - state.position;
  const double dist = delta.norm();
  if (dist <= arrival_tolerance) {
    state.position = target;
    return true;
  }
  const double bearing = std::atan2(delta.y(), delta.x());
  const double err = wrap_angle(bearing - state.heading);
  if (std::abs(err) > angular_tolerance) {
    // rotate in place toward the bearing, clamped to not overshoot it
    const double step = std::min(state.omega_ref * dt, std::abs(err));
    state.heading = wrap_angle(state.heading + std::copysign(step, err));
    return false;
  }
  // drive straight, clamped to the target
  const double advance = std::min(speed * dt, dist);
  state.position += advance * geom::Vec2(std::cos(state.heading),
                                         std::sin(state.heading));
  if ((target - state.position).norm() <= arrival_tolerance) {
    state.position = target;
    return true;
  }
  return false;
}

std::vector<int> connectivity_components(const std::vector<geom::Vec2>& pos,
                                         const std::vector<double>& ranges) {
  const int n = static_cast<int>(pos.size());
  std::vector<int> parent(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) parent[static_cast<size_t>(i)] = i;
  auto find = [&](int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] =
          parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double reach = std::min(ranges[static_cast<size_t>(i)],
                                    ranges[static_cast<size_t>(j)]);
      if ((pos[static_cast<size_t>(i)] - pos[static_cast<size_t>(j)]).norm() <=
          reach)
        parent[static_cast<size_t>(find(i))] = find(j);
    }
  std::vector<int> count(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) ++count[static_cast<size_t>(find(i))];
  std::vector<int> sizes;
  for (int c : count)
    if (c > 0) sizes.push_back(c);
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

}  // namespace ferry::sim
