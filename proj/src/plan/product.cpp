#include "ferry/plan/product.hpp"

#include <algorithm>

namespace ferry::plan {

ProductAutomaton build_product(const agent::RobotModel& m,
                               const ltl::BuchiAutomaton& a) {
  // every proposition the automaton can observe must be one the model emits
  std::set<std::string> props;
  for (const agent::RegionOfInterest& r : m.fts.regions) props.insert(r.label);
  for (const agent::ActionSpec& act : m.actions) props.insert(act.label);
  for (const std::string& ap : a.alphabet)
    if (!props.count(ap))
      throw PlanError("task proposition '" + ap +
                      "' is neither a region nor an action of this robot");

  ProductAutomaton p;
  p.num_model_states = m.num_states();
  p.num_nba_states = a.num_states;
  p.outgoing.resize(static_cast<size_t>(p.num_states()));
  p.accepting.assign(static_cast<size_t>(p.num_states()), 0);

  std::vector<ltl::Letter> letters(static_cast<size_t>(m.num_states()));
  for (int s = 0; s < m.num_states(); ++s) letters[s] = m.label(s);
  for (int s = 0; s < m.num_states(); ++s)
    for (int q : a.accepting) p.accepting[p.state_id(s, q)] = 1;

  const auto nba_out = a.outgoing();
  for (size_t mt = 0; mt < m.transitions.size(); ++mt) {
    const agent::RobotModel::Transition& t = m.transitions[mt];
    for (int q = 0; q < a.num_states; ++q) {
      const int from = p.state_id(t.from, q);
      for (const ltl::NbaTransition* nt : nba_out[q]) {
        if (!nt->guard.matches(letters[t.to])) continue;
        p.outgoing[from].push_back(static_cast<int>(p.transitions.size()));
        p.transitions.push_back({from, p.state_id(t.to, nt->to), t.duration,
                                 static_cast<int>(mt)});
      }
    }
  }

  // the NBA consumes the initial state's label when the run starts
  for (int q0 : a.initial)
    for (const ltl::NbaTransition* nt : nba_out[q0])
      if (nt->guard.matches(letters[m.initial_state]))
        p.initial.push_back(p.state_id(m.initial_state, nt->to));
  std::sort(p.initial.begin(), p.initial.end());
  p.initial.erase(std::unique(p.initial.begin(), p.initial.end()),
                  p.initial.end());
  if (p.initial.empty())
    throw PlanError("empty product: no automaton step matches the initial "
                    "state's label");
  return p;
}

}  // namespace ferry::plan
