// ============================================================================
// sim/types.hpp — kinematic robot state, simulation configuration, events,
// metrics, and team connectivity
// ============================================================================
#pragma once

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "ferry/geom/geometry.hpp"

namespace ferry::sim {

struct SimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a run violates one of its own safety invariants — a bug trap,
/// never an expected outcome.
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unicycle state plus the per-robot motion and communication constants.
struct RobotKinematics {
  geom::Vec2 position{0.0, 0.0};
  double heading = 0.0;   // radians in (-pi, pi]
  double v_ref = 0.5;     // m/s
  double omega_ref = 0.1; // rad/s
  double range = 1.0;     // communication radius, meters
};

struct SimConfig {
  double timestep = 0.05;          // seconds
  double horizon = 100.0;          // seconds
  double arrival_tolerance = 0.05; // meters
  double angular_tolerance = 0.05; // radians
  double transfer_duration = 1.0;  // per batch, seconds
  double upload_duration = 0.5;    // per batch, seconds
  unsigned rng_seed = 0;
  double velocity_noise = 0.0;     // relative std-dev of the speed input
};

/// One trace entry.  `kind` is one of: arrive, gather_start, gather_end,
/// meet_start, meet_end, transfer, upload, wait_start, wait_end, message,
/// fault, join, leave.  Payload keys depend on the kind.
struct SimEvent {
  double time = 0.0;
  int robot_id = -1;
  std::string kind;
  nlohmann::json payload;  // object; keys serialized in sorted order
};

/// Serialize one event as a single JSON line with a stable field order.
std::string event_to_jsonl(const SimEvent& e);

/// Per-sample team metrics row.
struct MetricsRow {
  double time = 0.0;
  std::vector<int> buffers;        // one per robot, by id
  int component_max = 0;           // largest connected component
  std::vector<int> uploads_by_type;  // cumulative
};

struct MetricsLog {
  std::vector<MetricsRow> rows;
  std::vector<double> meeting_waits;            // realized per-meeting waits
  std::vector<std::pair<double, double>> swaps; // (wait before, after)

  std::string to_csv() const;  // header + one line per row
};

/// Turn-and-forward waypoint tracking: rotate in place while the heading
/// error exceeds the angular tolerance, else drive straight at `speed`.
/// Both the rotation and the final approach are clamped so the robot never
/// overshoots alignment or the target.  Returns true once the position is
/// within `arrival_tolerance` of the target (position snapped exactly).
bool step_unicycle(RobotKinematics& state, const geom::Vec2& target, double dt,
                   double speed, double angular_tolerance,
                   double arrival_tolerance);

/// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

/// Sizes of the connected components of the proximity graph with an edge
/// between i and j iff |p_i - p_j| <= min(range_i, range_j), sorted
/// descending.
std::vector<int> connectivity_components(const std::vector<geom::Vec2>& pos,
                                         const std::vector<double>& ranges);

}  // namespace ferry::sim
