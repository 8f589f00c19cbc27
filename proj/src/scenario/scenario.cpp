#include "ferry/scenario/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "ferry/ltl/formula.hpp"

namespace ferry::scenario {

namespace {

nlohmann::json vec_json(const geom::Vec2& v) {
  return nlohmann::json::array({v.x(), v.y()});
}

geom::Vec2 vec_from(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

nlohmann::json polygon_json(const geom::Polygon& p) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& v : p) out.push_back(vec_json(v));
  return out;
}

geom::Polygon polygon_from(const nlohmann::json& j) {
  geom::Polygon p;
  for (const auto& v : j) p.push_back(vec_from(v));
  return p;
}

nlohmann::json robot_json(const RobotSpec& r) {
  nlohmann::json j;
  j["id"] = r.id;
  j["role"] = r.role == Role::Source ? "source" : "relay";
  j["start"] = vec_json(r.start);
  j["heading"] = r.heading;
  j["v_ref"] = r.v_ref;
  j["omega_ref"] = r.omega_ref;
  j["range"] = r.range;
  j["capacity"] = r.capacity;
  if (!r.task.empty()) j["task"] = r.task;
  return j;
}

RobotSpec robot_from(const nlohmann::json& j) {
  RobotSpec r;
  r.id = j.at("id").get<int>();
  const std::string role = j.at("role").get<std::string>();
  if (role != "source" && role != "relay")
    throw ScenarioError("unknown robot role '" + role + "'");
  r.role = role == "source" ? Role::Source : Role::Relay;
  r.start = vec_from(j.at("start"));
  r.heading = j.value("heading", 0.0);
  r.v_ref = j.at("v_ref").get<double>();
  r.omega_ref = j.at("omega_ref").get<double>();
  r.range = j.at("range").get<double>();
  r.capacity = j.at("capacity").get<int>();
  r.task = j.value("task", std::string());
  return r;
}

}  // namespace

nlohmann::json to_json(const Scenario& s) {
  nlohmann::json j;
  j["schema"] = s.schema;
  j["name"] = s.name;
  j["workspace"]["boundary"] = polygon_json(s.workspace.boundary);
  j["workspace"]["obstacles"] = nlohmann::json::array();
  for (const auto& o : s.workspace.obstacles)
    j["workspace"]["obstacles"].push_back(polygon_json(o));
  j["roadmap"]["builder"] =
      s.roadmap.builder == geom::RoadmapBuilder::Lattice ? "lattice"
                                                         : "triangulation";
  j["roadmap"]["pitch"] = s.roadmap.lattice_pitch;
  j["regions"] = nlohmann::json::array();
  for (const auto& r : s.regions)
    j["regions"].push_back({{"label", r.label}, {"point", vec_json(r.point)}});
  j["actions"] = nlohmann::json::array();
  for (const auto& a : s.actions)
    j["actions"].push_back({{"label", a.label},
                            {"duration", a.duration},
                            {"units", a.data_units},
                            {"type", a.data_type},
                            {"idle", a.idle}});
  j["robots"] = nlohmann::json::array();
  for (const auto& r : s.robots) j["robots"].push_back(robot_json(r));
  j["sim"] = {{"timestep", s.sim.timestep},
              {"horizon", s.sim.horizon},
              {"arrival_tolerance", s.sim.arrival_tolerance},
              {"angular_tolerance", s.sim.angular_tolerance},
              {"transfer_duration", s.sim.transfer_duration},
              {"upload_duration", s.sim.upload_duration},
              {"rng_seed", s.sim.rng_seed},
              {"velocity_noise", s.sim.velocity_noise}};
  auto& v = j["variants"];
  v["swap_enabled"] = s.swap_enabled;
  v["fault_policy_enabled"] = s.fault_policy_enabled;
  v["t_max"] = s.t_max;
  if (s.use_data_center) v["data_center"] = vec_json(s.data_center);
  v["faults"] = nlohmann::json::array();
  for (const auto& f : s.faults)
    v["faults"].push_back({{"time", f.time}, {"robot", f.robot_id}});
  v["joins"] = nlohmann::json::array();
  for (const auto& f : s.joins)
    v["joins"].push_back({{"time", f.time}, {"robot", robot_json(f.robot)}});
  v["leaves"] = nlohmann::json::array();
  for (const auto& f : s.leaves)
    v["leaves"].push_back({{"time", f.time}, {"robot", f.robot_id}});
  if (s.v_lo < s.v_hi)
    v["velocity_range"] = nlohmann::json::array({s.v_lo, s.v_hi});
  if (s.omega_lo < s.omega_hi)
    v["omega_range"] = nlohmann::json::array({s.omega_lo, s.omega_hi});
  return j;
}

Scenario from_json(const nlohmann::json& j) {
  Scenario s;
  s.schema = j.value("schema", 1);
  if (s.schema != 1)
    throw ScenarioError("unsupported schema version " +
                        std::to_string(s.schema));
  s.name = j.value("name", std::string());
  s.workspace.boundary = polygon_from(j.at("workspace").at("boundary"));
  for (const auto& o : j.at("workspace").value("obstacles",
                                               nlohmann::json::array()))
    s.workspace.obstacles.push_back(polygon_from(o));
  if (j.contains("roadmap")) {
    const std::string b = j["roadmap"].value("builder", "lattice");
    if (b != "lattice" && b != "triangulation")
      throw ScenarioError("unknown roadmap builder '" + b + "'");
    s.roadmap.builder = b == "lattice" ? geom::RoadmapBuilder::Lattice
                                       : geom::RoadmapBuilder::Triangulation;
    s.roadmap.lattice_pitch = j["roadmap"].value("pitch", 1.0);
  }
  for (const auto& r : j.at("regions"))
    s.regions.push_back(
        {r.at("label").get<std::string>(), vec_from(r.at("point")), -1});
  for (const auto& a : j.at("actions"))
    s.actions.push_back({a.at("label").get<std::string>(),
                         a.at("duration").get<double>(),
                         a.at("units").get<int>(), a.at("type").get<int>(),
                         a.value("idle", false)});
  for (const auto& r : j.at("robots")) s.robots.push_back(robot_from(r));
  if (j.contains("sim")) {
    const auto& c = j["sim"];
    s.sim.timestep = c.value("timestep", s.sim.timestep);
    s.sim.horizon = c.value("horizon", s.sim.horizon);
    s.sim.arrival_tolerance =
        c.value("arrival_tolerance", s.sim.arrival_tolerance);
    s.sim.angular_tolerance =
        c.value("angular_tolerance", s.sim.angular_tolerance);
    s.sim.transfer_duration =
        c.value("transfer_duration", s.sim.transfer_duration);
    s.sim.upload_duration = c.value("upload_duration", s.sim.upload_duration);
    s.sim.rng_seed = c.value("rng_seed", s.sim.rng_seed);
    s.sim.velocity_noise = c.value("velocity_noise", s.sim.velocity_noise);
  }
  if (j.contains("variants")) {
    const auto& v = j["variants"];
    s.swap_enabled = v.value("swap_enabled", true);
    s.fault_policy_enabled = v.value("fault_policy_enabled", true);
    s.t_max = v.value("t_max", 30.0);
    if (v.contains("data_center") && !v["data_center"].is_null()) {
      s.use_data_center = true;
      s.data_center = vec_from(v["data_center"]);
    }
    for (const auto& f : v.value("faults", nlohmann::json::array()))
      s.faults.push_back({f.at("time").get<double>(),
                          f.at("robot").get<int>()});
    for (const auto& f : v.value("joins", nlohmann::json::array()))
      s.joins.push_back(
          {f.at("time").get<double>(), robot_from(f.at("robot"))});
    for (const auto& f : v.value("leaves", nlohmann::json::array()))
      s.leaves.push_back({f.at("time").get<double>(),
                          f.at("robot").get<int>()});
    if (v.contains("velocity_range")) {
      s.v_lo = v["velocity_range"].at(0).get<double>();
      s.v_hi = v["velocity_range"].at(1).get<double>();
    }
    if (v.contains("omega_range")) {
      s.omega_lo = v["omega_range"].at(0).get<double>();
      s.omega_hi = v["omega_range"].at(1).get<double>();
    }
  }
  return s;
}

std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> errors;
  auto err = [&](const std::string& m) { errors.push_back(m); };

  try {
    s.workspace.validate();
  } catch (const geom::WorkspaceError& e) {
    err(std::string("workspace: ") + e.what());
  }
  if (s.roadmap.builder == geom::RoadmapBuilder::Lattice &&
      s.roadmap.lattice_pitch <= 0)
    err("roadmap.pitch: must be positive");

  if (s.regions.empty()) err("regions: at least one region is required");
  std::set<std::string> labels;
  for (size_t i = 0; i < s.regions.size(); ++i) {
    if (s.regions[i].label.empty())
      err("regions[" + std::to_string(i) + "].label: empty");
    if (!labels.insert(s.regions[i].label).second)
      err("regions[" + std::to_string(i) + "].label: duplicate '" +
          s.regions[i].label + "'");
  }

  int idle_count = 0, max_units = 0, gathering = 0;
  for (size_t i = 0; i < s.actions.size(); ++i) {
    const auto& a = s.actions[i];
    const std::string at = "actions[" + std::to_string(i) + "]";
    if (a.label.empty()) err(at + ".label: empty");
    if (!labels.insert(a.label).second)
      err(at + ".label: duplicate '" + a.label + "'");
    if (a.duration < 0) err(at + ".duration: negative");
    if (a.data_units < 0) err(at + ".units: negative");
    if (a.idle) {
      ++idle_count;
      if (a.data_units != 0) err(at + ": an idle action cannot gather data");
    }
    max_units = std::max(max_units, a.data_units);
    gathering += a.data_units > 0;
  }
  if (idle_count != 1) err("actions: exactly one idle action is required");
  if (gathering == 0) err("actions: no action gathers any data");

  if (s.robots.empty()) err("robots: at least one robot is required");
  auto check_robot = [&](const RobotSpec& r, const std::string& at) {
    if (r.v_ref <= 0) err(at + ".v_ref: must be positive");
    if (r.omega_ref <= 0) err(at + ".omega_ref: must be positive");
    if (r.range <= 0) err(at + ".range: must be positive");
    if (r.capacity < 1) err(at + ".capacity: must be at least 1");
    if (r.role == Role::Source) {
      if (r.capacity < max_units)
        err(at + ".capacity: " + std::to_string(r.capacity) +
            " is below the largest action's " + std::to_string(max_units) +
            " data units");
      if (r.task.empty()) {
        err(at + ".task: sources need a task");
      } else {
        try {
          ltl::parse_ltl(r.task, std::set<std::string>(labels));
        } catch (const std::exception& e) {
          err(at + ".task: " + e.what());
        }
      }
    } else if (!r.task.empty()) {
      err(at + ".task: relays carry no task");
    }
    if (!s.workspace.boundary.empty() &&
        !s.workspace.in_free_space(r.start))
      err(at + ".start: outside the free space");
  };
  for (size_t i = 0; i < s.robots.size(); ++i) {
    const std::string at = "robots[" + std::to_string(i) + "]";
    if (s.robots[i].id != static_cast<int>(i))
      err(at + ".id: must be " + std::to_string(i) + " (dense, ascending)");
    check_robot(s.robots[i], at);
  }

  // every source must start connected to at least one relay
  for (size_t i = 0; i < s.robots.size(); ++i) {
    const auto& src = s.robots[i];
    if (src.role != Role::Source) continue;
    bool connected = false;
    for (const auto& rel : s.robots)
      if (rel.role == Role::Relay &&
          (src.start - rel.start).norm() <= std::min(src.range, rel.range))
        connected = true;
    if (!connected)
      err("robots[" + std::to_string(i) +
          "]: source starts out of range of every relay");
  }

  if (s.sim.timestep <= 0) err("sim.timestep: must be positive");
  if (s.sim.horizon <= 0) err("sim.horizon: must be positive");
  if (s.sim.arrival_tolerance <= 0)
    err("sim.arrival_tolerance: must be positive");
  if (s.sim.angular_tolerance <= 0)
    err("sim.angular_tolerance: must be positive");
  if (s.sim.velocity_noise < 0) err("sim.velocity_noise: negative");
  if (s.t_max <= 0) err("variants.t_max: must be positive");
  if (s.use_data_center && !s.workspace.boundary.empty() &&
      !s.workspace.in_free_space(s.data_center))
    err("variants.data_center: outside the free space");
  for (size_t i = 0; i < s.joins.size(); ++i)
    check_robot(s.joins[i].robot, "variants.joins[" + std::to_string(i) + "]");
  for (size_t i = 0; i < s.faults.size(); ++i)
    if (s.faults[i].robot_id < 0 ||
        s.faults[i].robot_id >= static_cast<int>(s.robots.size()))
      err("variants.faults[" + std::to_string(i) + "]: unknown robot");
  return errors;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError("parse error in '" + path + "': " + e.what());
  }
  Scenario s = from_json(j);
  const auto errors = validate(s);
  if (!errors.empty()) {
    std::ostringstream msg;
    msg << "invalid scenario '" << path << "':";
    for (const auto& e : errors) msg << "\n  - " << e;
    throw ScenarioError(msg.str());
  }
  return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write '" + path + "'");
  out << to_json(s).dump(2) << "\n";
}

}  // namespace ferry::scenario
