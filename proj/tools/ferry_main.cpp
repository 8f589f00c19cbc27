// ============================================================================
// ferry_main.cpp — command-line front end
//
//   ferry run <scenario> [--mode dynamic|static1|static2|centralized]
//   ferry compare <scenario> [--seeds N]
//   ferry validate <scenario>
//   ferry bundle
//
// A <scenario> argument is either a bundled scenario name or a path to a
// scenario JSON file.  Exit codes: 0 success, 2 validation failure,
// 3 invariant violation, 4 size-bound refusal.  Set FERRY_LOG=quiet to
// silence progress messages.
// ============================================================================
#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ferry/baselines/baselines.hpp"
#include "ferry/scenario/scenario.hpp"
#include "ferry/sim/engine.hpp"

namespace fs = std::filesystem;
using namespace ferry;

namespace {

bool quiet() {
  const char* v = std::getenv("FERRY_LOG");
  return v && std::string(v) == "quiet";
}

void info(const std::string& msg) {
  if (!quiet()) std::cerr << msg << "\n";
}

scenario::Scenario resolve_scenario(const std::string& ref) {
  const auto names = scenario::bundled_names();
  if (std::find(names.begin(), names.end(), ref) != names.end())
    return scenario::bundled_scenario(ref);
  return scenario::load_scenario(ref);
}

// Everything the summary reports about a run is replayed from the event
// stream, so the numbers in summary.json are the numbers in events.jsonl.
struct Replay {
  std::map<int, int> uploads_by_type;
  int total_uploads = 0;
  double total_wait = 0.0;
};

Replay replay_events(const std::vector<sim::SimEvent>& events) {
  Replay r;
  for (const auto& e : events) {
    if (e.kind == "upload") {
      const int units = e.payload.at("units").get<int>();
      r.uploads_by_type[e.payload.at("type").get<int>()] += units;
      r.total_uploads += units;
    } else if (e.kind == "wait_end") {
      r.total_wait += e.payload.at("duration").get<double>();
    }
  }
  return r;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

nlohmann::json run_summary(const scenario::Scenario& s, const std::string& mode,
                           const sim::SimResult& r) {
  const Replay replay = replay_events(r.events);
  nlohmann::json j;
  j["scenario"] = s.name;
  j["mode"] = mode;
  j["seed"] = s.sim.rng_seed;
  j["horizon"] = s.sim.horizon;
  j["total_uploads"] = replay.total_uploads;
  j["uploads_by_type"] = nlohmann::json::object();
  for (const auto& [type, units] : replay.uploads_by_type)
    j["uploads_by_type"][std::to_string(type)] = units;
  j["total_wait"] = replay.total_wait;
  j["swap_history"] = nlohmann::json::array();
  for (const auto& [before, after] : r.metrics.swaps)
    j["swap_history"].push_back({{"wait_before", before},
                                 {"wait_after", after}});
  j["plan_costs"] = nlohmann::json::array();
  for (const auto& t : r.traces)
    j["plan_costs"].push_back({{"robot", t.robot_id},
                               {"prefix_cost", t.prefix_cost},
                               {"suffix_cost", t.suffix_cost}});
  j["wall_clock_seconds"] = r.wall_clock_seconds;
  return j;
}

void write_run_outputs(const fs::path& dir, const scenario::Scenario& s,
                       const std::string& mode, const sim::SimResult& r) {
  fs::create_directories(dir);
  std::string events;
  for (const auto& e : r.events) events += sim::event_to_jsonl(e) + "\n";
  write_text(dir / "events.jsonl", events);
  write_text(dir / "metrics.csv", r.metrics.to_csv());
  write_text(dir / "summary.json", run_summary(s, mode, r).dump(2) + "\n");
}

nlohmann::json centralized_summary(const scenario::Scenario& s,
                                   const baselines::CentralizedPlan& cp) {
  nlohmann::json j;
  j["scenario"] = s.name;
  j["mode"] = "centralized";
  j["joint_states"] = cp.system.states.size();
  j["joint_transitions"] = cp.system.transitions.size();
  j["estimated_states"] = cp.system.estimated_states;
  j["nba_states"] = cp.nba.num_states;
  j["prefix_cost"] = cp.prefix_cost;
  j["suffix_cost"] = cp.suffix_cost;
  j["prefix"] = cp.prefix;
  j["suffix"] = cp.suffix;
  j["wall_clock_seconds"] = cp.synthesis_seconds;
  return j;
}

sim::Mode parse_mode(const std::string& mode) {
  if (mode == "dynamic") return sim::Mode::Dynamic;
  if (mode == "static1") return sim::Mode::StaticOne;
  if (mode == "static2") return sim::Mode::StaticTwo;
  throw CLI::ValidationError("--mode", "unknown mode '" + mode + "'");
}

int cmd_run(const std::string& ref, const std::string& mode,
            const std::string& out, int seed) {
  scenario::Scenario s = resolve_scenario(ref);
  if (seed >= 0) s.sim.rng_seed = static_cast<unsigned>(seed);

  if (mode == "centralized") {
    info("synthesizing a joint plan for '" + s.name + "'");
    const auto cp = baselines::centralized_synthesize(s);
    fs::create_directories(out);
    write_text(fs::path(out) / "summary.json",
               centralized_summary(s, cp).dump(2) + "\n");
    info("joint plan: prefix " + std::to_string(cp.prefix_cost) + " s, suffix " +
         std::to_string(cp.suffix_cost) + " s");
    return 0;
  }

  info("running '" + s.name + "' in mode " + mode + ", seed " +
       std::to_string(s.sim.rng_seed));
  const auto r = sim::run_simulation(s, parse_mode(mode));
  write_run_outputs(out, s, mode, r);
  info("uploaded " + std::to_string(r.total_uploads) + " units; outputs in " +
       out);
  return 0;
}

int cmd_compare(const std::string& ref, const std::string& out, int seeds) {
  const scenario::Scenario base = resolve_scenario(ref);
  const std::vector<std::string> modes = {"dynamic", "static1", "static2"};

  // every (seed, mode) run is independent — fan out
  std::vector<std::future<sim::SimResult>> futures;
  for (int seed = 0; seed < seeds; ++seed)
    for (const auto& mode : modes)
      futures.push_back(std::async(std::launch::async, [&, seed, mode] {
        scenario::Scenario s = base;
        s.sim.rng_seed = static_cast<unsigned>(seed);
        return sim::run_simulation(s, parse_mode(mode));
      }));
  std::vector<sim::SimResult> results;
  for (auto& f : futures) results.push_back(f.get());
  const auto result_of = [&](int seed, size_t m) -> const sim::SimResult& {
    return results[seed * modes.size() + m];
  };

  std::set<int> types;
  for (const auto& r : results)
    for (const auto& [type, units] : replay_events(r.events).uploads_by_type)
      types.insert(type);

  std::ostringstream table;
  table << "seed,mode,total_uploads";
  for (int t : types) table << ",uploads_type_" << t;
  table << ",total_wait\n";
  nlohmann::json summary;
  summary["scenario"] = base.name;
  summary["seeds"] = seeds;
  summary["runs"] = nlohmann::json::array();
  int ordered = 0;
  for (int seed = 0; seed < seeds; ++seed) {
    std::vector<int> totals;
    for (size_t m = 0; m < modes.size(); ++m) {
      const Replay rep = replay_events(result_of(seed, m).events);
      totals.push_back(rep.total_uploads);
      table << seed << "," << modes[m] << "," << rep.total_uploads;
      for (int t : types) {
        const auto it = rep.uploads_by_type.find(t);
        table << "," << (it == rep.uploads_by_type.end() ? 0 : it->second);
      }
      table << "," << rep.total_wait << "\n";
      summary["runs"].push_back({{"seed", seed},
                                 {"mode", modes[m]},
                                 {"total_uploads", rep.total_uploads},
                                 {"total_wait", rep.total_wait}});
    }
    ordered += totals[0] >= totals[1] && totals[1] >= totals[2];
  }
  summary["seeds_with_expected_ordering"] = ordered;

  // cumulative uploads over time for the first seed, one column per mode
  std::ostringstream series;
  series << "time";
  for (const auto& mode : modes) series << "," << mode;
  series << "\n";
  size_t rows = std::numeric_limits<size_t>::max();
  for (size_t m = 0; m < modes.size(); ++m)
    rows = std::min(rows, result_of(0, m).metrics.rows.size());
  for (size_t i = 0; i < rows; ++i) {
    series << result_of(0, 0).metrics.rows[i].time;
    for (size_t m = 0; m < modes.size(); ++m) {
      const auto& row = result_of(0, m).metrics.rows[i];
      int total = 0;
      for (int u : row.uploads_by_type) total += u;
      series << "," << total;
    }
    series << "\n";
  }

  fs::create_directories(out);
  write_text(fs::path(out) / "comparison.csv", table.str());
  write_text(fs::path(out) / "cumulative_uploads.csv", series.str());
  write_text(fs::path(out) / "summary.json", summary.dump(2) + "\n");
  info("expected ordering held in " + std::to_string(ordered) + "/" +
       std::to_string(seeds) + " seeds; outputs in " + out);
  return 0;
}

int cmd_validate(const std::string& ref) {
  const auto names = scenario::bundled_names();
  scenario::Scenario s;
  if (std::find(names.begin(), names.end(), ref) != names.end()) {
    s = scenario::bundled_scenario(ref);
  } else {
    std::ifstream in(ref);
    if (!in) throw scenario::ScenarioError("cannot open '" + ref + "'");
    nlohmann::json j;
    in >> j;
    s = scenario::from_json(j);
  }
  const auto errors = scenario::validate(s);
  if (errors.empty()) {
    std::cout << "ok\n";
    return 0;
  }
  for (const auto& e : errors) std::cout << e << "\n";
  return 2;
}

int cmd_bundle(const std::string& out) {
  fs::create_directories(out);
  for (const auto& name : scenario::bundled_names()) {
    const auto path = fs::path(out) / (name + ".json");
    scenario::save_scenario(scenario::bundled_scenario(name), path.string());
    info("wrote " + path.string());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planning and simulation for data-ferrying robot teams"};
  app.require_subcommand(1);

  std::string ref, mode = "dynamic", out = "out";
  int seed = -1, seeds = 1;

  auto* run = app.add_subcommand("run", "run one scenario in one mode");
  run->add_option("scenario", ref, "bundled name or JSON path")->required();
  run->add_option("--mode", mode,
                  "dynamic | static1 | static2 | centralized");
  run->add_option("--out", out, "output directory");
  run->add_option("--seed", seed, "override the scenario's seed");

  auto* compare =
      app.add_subcommand("compare", "run all three strategies on equal seeds");
  compare->add_option("scenario", ref, "bundled name or JSON path")->required();
  compare->add_option("--out", out, "output directory");
  compare->add_option("--seeds", seeds, "number of seeds (0..N-1)")
      ->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "check a scenario");
  validate->add_option("scenario", ref, "bundled name or JSON path")
      ->required();

  auto* bundle =
      app.add_subcommand("bundle", "write the bundled scenarios as JSON");
  std::string bundle_out = "scenarios";
  bundle->add_option("--out", bundle_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(ref, mode, out, seed);
    if (compare->parsed()) return cmd_compare(ref, out, seeds);
    if (validate->parsed()) return cmd_validate(ref);
    return cmd_bundle(bundle_out);
  } catch (const baselines::StateSpaceBound& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const sim::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const scenario::ScenarioError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const sim::SimError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
