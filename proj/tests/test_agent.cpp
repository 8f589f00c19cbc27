#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ferry/agent/model.hpp"

using namespace ferry::agent;
using ferry::geom::Vec2;
using ferry::geom::Workspace;

namespace {

std::vector<ActionSpec> idle_plus(int gathering, double dur = 1.0) {
  std::vector<ActionSpec> acts;
  acts.push_back({"g0", 0.0, 0, 0, true});
  for (int k = 1; k <= gathering; ++k)
    acts.push_back({"g" + std::to_string(k), dur, k, k, false});
  return acts;
}

}  // namespace

TEST_CASE("gather respects the capacity bound") {
  BufferLedger b(4);
  apply_gather(b, 2, 1, 0.0);
  CHECK(b.stored() == 2);
  apply_gather(b, 0, 1, 1.0);  // idle
  CHECK(b.stored() == 2);
  CHECK(b.history().size() == 1);
  apply_gather(b, 1, 2, 2.0);
  CHECK(b.stored() == 3);
  CHECK_THROWS_AS(apply_gather(b, 2, 1, 3.0), ProtocolViolation);
  CHECK(b.stored() == 3);
}

TEST_CASE("transfer moves oldest batches first") {
  BufferLedger src(10), dst(5);
  apply_gather(src, 2, 1, 0.0);
  apply_gather(src, 3, 2, 1.0);
  apply_transfer(src, dst, 4, 2.0, 7, 8);
  CHECK(src.stored() == 1);
  CHECK(dst.stored() == 4);
  REQUIRE(dst.batches().size() == 2);
  CHECK(dst.batches()[0].data_type == 1);
  CHECK(dst.batches()[0].units == 2);
  CHECK(dst.batches()[1].data_type == 2);
  CHECK(dst.batches()[1].units == 2);
  REQUIRE(src.batches().size() == 1);
  CHECK(src.batches()[0].data_type == 2);

  CHECK_THROWS(apply_transfer(src, dst, 4, 3.0, 7, 8));  // > stored
}

TEST_CASE("transfer destination overflow is rejected") {
  BufferLedger src(10), dst(5);
  apply_gather(src, 4, 1, 0.0);
  apply_gather(dst, 3, 1, 0.0);
  CHECK_THROWS(apply_transfer(src, dst, 3, 1.0, 0, 1));
  CHECK(src.stored() == 4);
  CHECK(dst.stored() == 3);
  apply_transfer(src, dst, 2, 2.0, 0, 1);
  CHECK(dst.stored() == 5);
}

TEST_CASE("upload removes oldest units and reports types") {
  BufferLedger b(8);
  apply_gather(b, 2, 1, 0.0);
  apply_gather(b, 3, 2, 1.0);
  auto up = apply_upload(b, 4, 2.0, -1);
  CHECK(b.stored() == 1);
  REQUIRE(up.size() == 2);
  CHECK(up[0].data_type == 1);
  CHECK(up[0].units == 2);
  CHECK(up[1].data_type == 2);
  CHECK(up[1].units == 2);
  CHECK_THROWS(apply_upload(b, 2, 3.0, -1));
  auto rest = apply_upload(b, 1, 3.0, -1);
  CHECK(b.stored() == 0);
  CHECK(rest[0].data_type == 2);
}

TEST_CASE("history replays to the stored value under random traffic") {
  std::mt19937 rng(31);
  for (int it = 0; it < 100; ++it) {
    BufferLedger a(3 + static_cast<int>(rng() % 5));
    BufferLedger b(3 + static_cast<int>(rng() % 5));
    int gathered = 0, uploaded = 0;
    for (int step = 0; step < 60; ++step) {
      const double t = step;
      switch (rng() % 4) {
        case 0: {
          const int u = static_cast<int>(rng() % 3);
          const int type = static_cast<int>(rng() % 3);
          BufferLedger& tgt = (rng() % 2) ? a : b;
          if (tgt.stored() + u <= tgt.capacity()) {
            apply_gather(tgt, u, type, t);
            gathered += u;
          }
          break;
        }
        case 1: {
          const int u = 1 + static_cast<int>(rng() % 3);
          if (u <= a.stored() && b.stored() + u <= b.capacity())
            apply_transfer(a, b, u, t, 0, 1);
          break;
        }
        case 2: {
          const int u = 1 + static_cast<int>(rng() % 3);
          if (u <= b.stored() && a.stored() + u <= a.capacity())
            apply_transfer(b, a, u, t, 1, 0);
          break;
        }
        default: {
          const int u = 1 + static_cast<int>(rng() % 3);
          BufferLedger& tgt = (rng() % 2) ? a : b;
          if (u <= tgt.stored()) {
            apply_upload(tgt, u, t, -1);
            uploaded += u;
          }
          break;
        }
      }
      CHECK(BufferLedger::replay(a.history()) == a.stored());
      CHECK(BufferLedger::replay(b.history()) == b.stored());
      // conservation across the team plus the data center
      CHECK(gathered == a.stored() + b.stored() + uploaded);
    }
  }
}

TEST_CASE("motion FTS on an open square is complete and symmetric") {
  Workspace w;
  w.boundary = {{0, 0}, {6, 0}, {6, 6}, {0, 6}};
  auto r = build_lattice_roadmap(w, 1.0);
  std::vector<RegionOfInterest> regions = {{"r1", {0, 0}}, {"r2", {5, 5}}};
  auto fts = build_motion_fts(r, regions, 0.5, 0.1);
  REQUIRE(fts.transitions.size() == 2);
  const auto* ab = fts.find(0, 1);
  const auto* ba = fts.find(1, 0);
  REQUIRE(ab != nullptr);
  REQUIRE(ba != nullptr);
  CHECK(ab->duration == doctest::Approx(ba->duration));
  CHECK(ab->path.front() == fts.regions[0].snapped_waypoint);
  CHECK(ab->path.back() == fts.regions[1].snapped_waypoint);
}

TEST_CASE("a middle region blocks the direct outer transition") {
  // one-row corridor: every path between the ends passes the middle cell
  Workspace w;
  w.boundary = {{-0.25, -0.25}, {4.25, -0.25}, {4.25, 0.25}, {-0.25, 0.25}};
  auto r = build_lattice_roadmap(w, 1.0);
  std::vector<RegionOfInterest> regions = {
      {"left", {0, 0}}, {"mid", {2, 0}}, {"right", {4, 0}}};
  auto fts = build_motion_fts(r, regions, 0.5, 0.1);
  CHECK(fts.find(0, 1) != nullptr);
  CHECK(fts.find(1, 2) != nullptr);
  CHECK(fts.find(0, 2) == nullptr);
  CHECK(fts.find(2, 0) == nullptr);
}

TEST_CASE("unreachable regions and duplicate snaps are errors") {
  // two towers joined only by a corridor thinner than the lattice pitch,
  // so the roadmap has two components
  Workspace w;
  w.boundary = {{0, 0},   {3, 0},   {3, 3.4}, {4, 3.4}, {4, 0},   {7, 0},
                {7, 7},   {4, 7},   {4, 3.6}, {3, 3.6}, {3, 7},   {0, 7}};
  auto r = build_lattice_roadmap(w, 1.0);
  std::vector<RegionOfInterest> regions = {{"r1", {1, 1}}, {"r2", {6, 6}}};
  CHECK_THROWS(build_motion_fts(r, regions, 0.5, 0.1));

  Workspace open;
  open.boundary = {{0, 0}, {4, 0}, {4, 4}, {0, 4}};
  auto r2 = build_lattice_roadmap(open, 1.0);
  std::vector<RegionOfInterest> same = {{"r1", {1, 1}}, {"r2", {1.2, 1.1}}};
  CHECK_THROWS(build_motion_fts(r2, same, 0.5, 0.1));
}

TEST_CASE("composed model sizes match the expected counts") {
  Workspace w;
  w.boundary = {{0, 0}, {8, 0}, {8, 8}, {0, 8}};
  auto r = build_lattice_roadmap(w, 1.0);
  std::vector<RegionOfInterest> regions = {
      {"start", {0, 0}}, {"r1", {7, 0}}, {"r2", {7, 7}}, {"r3", {0, 7}}};
  auto fts = build_motion_fts(r, regions, 0.5, 0.1);
  REQUIRE(fts.transitions.size() == 12);  // complete over 4 regions

  // 4 regions x 4 actions -> 16 states, 12*4 motion + 4*16 in-place = 112
  auto m4 = compose_robot_model(fts, idle_plus(3));
  CHECK(m4.num_states() == 16);
  CHECK(m4.transitions.size() == 112);

  // 4 regions x 3 actions -> 12 states, 12*3 + 4*9 = 72
  auto m3 = compose_robot_model(fts, idle_plus(2));
  CHECK(m3.num_states() == 12);
  CHECK(m3.transitions.size() == 72);

  // 2 regions x 2 actions -> 4 states
  std::vector<RegionOfInterest> two = {{"a", {0, 0}}, {"b", {7, 7}}};
  auto m2 = compose_robot_model(build_motion_fts(r, two, 0.5, 0.1),
                                idle_plus(1));
  CHECK(m2.num_states() == 4);
}

TEST_CASE("no transition both moves and performs a non-idle action") {
  Workspace w;
  w.boundary = {{0, 0}, {8, 0}, {8, 8}, {0, 8}};
  auto r = build_lattice_roadmap(w, 1.0);
  std::vector<RegionOfInterest> regions = {
      {"start", {0, 0}}, {"r1", {7, 0}}, {"r2", {7, 7}}};
  auto m = compose_robot_model(build_motion_fts(r, regions, 0.5, 0.1),
                               idle_plus(3));
  for (const auto& t : m.transitions) {
    const bool moved = m.region_of(t.from) != m.region_of(t.to);
    if (moved) {
      CHECK(m.action_of(t.to) == m.idle_action);
      CHECK(t.motion >= 0);
      // duration includes travel
      CHECK(t.duration >=
            m.fts.transitions[static_cast<size_t>(t.motion)].duration);
    } else {
      // in-place switch costs the target action's duration alone
      CHECK(t.motion == -1);
      CHECK(t.duration ==
            doctest::Approx(m.actions[m.action_of(t.to)].duration));
    }
  }
  // labeling carries region and action propositions
  const auto lbl = m.label(m.state_id(1, 2));
  CHECK(lbl.count("r1") == 1);
  CHECK(lbl.count("g2") == 1);
  // initial state is (initial region, idle)
  CHECK(m.region_of(m.initial_state) == m.fts.initial);
  CHECK(m.action_of(m.initial_state) == m.idle_action);
}

TEST_CASE("composition validates the idle action") {
  Workspace w;
  w.boundary = {{0, 0}, {4, 0}, {4, 4}, {0, 4}};
  auto r = build_lattice_roadmap(w, 1.0);
  std::vector<RegionOfInterest> regions = {{"a", {0, 0}}, {"b", {3, 3}}};
  auto fts = build_motion_fts(r, regions, 0.5, 0.1);

  std::vector<ActionSpec> no_idle = {{"g1", 1.0, 1, 1, false}};
  CHECK_THROWS(compose_robot_model(fts, no_idle));

  std::vector<ActionSpec> bad_idle = {{"g0", 0.0, 2, 0, true}};
  CHECK_THROWS(compose_robot_model(fts, bad_idle));

  std::vector<ActionSpec> two_idle = {{"g0", 0.0, 0, 0, true},
                                      {"gx", 0.0, 0, 0, true}};
  CHECK_THROWS(compose_robot_model(fts, two_idle));
}
