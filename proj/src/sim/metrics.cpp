#include <sstream>

#include "ferry/sim/types.hpp"

namespace ferry::sim {

std::string event_to_jsonl(const SimEvent& e) {
  // nlohmann::json objects keep keys sorted, so serialization is stable;
  // time/robot/kind lead for readability
  nlohmann::json j;
  j["time"] = e.time;
  j["robot"] = e.robot_id;
  j["kind"] = e.kind;
  if (!e.payload.is_null()) j["payload"] = e.payload;
  return j.dump();
}

std::string MetricsLog::to_csv() const {
  std::ostringstream out;
  const size_t nr = rows.empty() ? 0 : rows.front().buffers.size();
  const size_t nt = rows.empty() ? 0 : rows.front().uploads_by_type.size();
  out << "time";
  for (size_t i = 0; i < nr; ++i) out << ",buffer_" << i;
  out << ",component_max";
  for (size_t t = 0; t < nt; ++t) out << ",uploads_type_" << t;
  out << "\n";
  for (const MetricsRow& r : rows) {
    out << r.time;
    for (int b : r.buffers) out << "," << b;
    out << "," << r.component_max;
    for (int u : r.uploads_by_type) out << "," << u;
    out << "\n";
  }
  return out.str();
}

}  // namespace ferry::sim
