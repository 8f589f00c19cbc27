#include "ferry/baselines/baselines.hpp"

namespace ferry::baselines {

sim::SimResult run_static_one(const scenario::Scenario& s) {
  return sim::run_simulation(s, sim::Mode::StaticOne);
}

}  // namespace ferry::baselines
