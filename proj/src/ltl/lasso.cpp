// Lasso-word membership: simulate the prefix as a reachable state set, then
// look for a reachable nontrivial SCC containing an accepting state in the
// product of the automaton with the cycle positions.

#include <functional>

#include <nlohmann/json.hpp>

#include "ferry/ltl/nba.hpp"

namespace ferry::ltl {

bool accepts_lasso(const BuchiAutomaton& a, const Word& prefix,
                   const Word& cycle) {
  if (cycle.empty()) throw std::invalid_argument("lasso cycle must be nonempty");
  const auto out = a.outgoing();

  std::vector<bool> current(a.num_states, false);
  for (int q : a.initial) current[q] = true;
  for (const Letter& letter : prefix) {
    std::vector<bool> next(a.num_states, false);
    for (int q = 0; q < a.num_states; ++q) {
      if (!current[q]) continue;
      for (const auto* t : out[q])
        if (t->guard.matches(letter)) next[t->to] = true;
    }
    current = std::move(next);
  }

  const int L = static_cast<int>(cycle.size());
  const int n = a.num_states * L;
  auto id = [&](int q, int pos) { return q * L + pos; };

  // Tarjan over the reachable part of the product graph.
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<bool> on_stack(n, false);
  int counter = 0;
  bool found = false;

  std::function<void(int)> strongconnect = [&](int v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    const int q = v / L, pos = v % L;
    for (const auto* t : out[q]) {
      if (!t->guard.matches(cycle[pos])) continue;
      const int w = id(t->to, (pos + 1) % L);
      if (index[w] < 0) {
        strongconnect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<int> scc;
      for (;;) {
        int w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        scc.push_back(w);
        if (w == v) break;
      }
      bool has_accepting = false;
      for (int w : scc)
        if (a.accepting.count(w / L)) has_accepting = true;
      if (!has_accepting) return;
      if (scc.size() > 1) {
        found = true;
        return;
      }
      // singleton: needs a self-loop in the product
      const int sq = scc[0] / L, spos = scc[0] % L;
      for (const auto* t : out[sq]) {
        if (t->to == sq && (spos + 1) % L == spos &&
            t->guard.matches(cycle[spos])) {
          found = true;
        }
      }
    }
  };

  for (int q = 0; q < a.num_states && !found; ++q)
    if (current[q] && index[id(q, 0)] < 0) strongconnect(id(q, 0));
  return found;
}

std::string nba_to_json(const BuchiAutomaton& a) {
  nlohmann::json j;
  j["num_states"] = a.num_states;
  j["alphabet"] = a.alphabet;
  j["initial"] = a.initial;
  j["accepting"] = a.accepting;
  auto& ts = j["transitions"] = nlohmann::json::array();
  for (const auto& t : a.transitions) {
    ts.push_back({{"from", t.from},
                  {"pos", t.guard.positive},
                  {"neg", t.guard.negative},
                  {"to", t.to}});
  }
  return j.dump(2);
}

}  // namespace ferry::ltl
