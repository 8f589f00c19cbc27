#include "ferry/baselines/baselines.hpp"

namespace ferry::baselines {

sim::SimResult run_static_two(const scenario::Scenario& s) {
  return sim::run_simulation(s, sim::Mode::StaticTwo);
}

}  // namespace ferry::baselines
