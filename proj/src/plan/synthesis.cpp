#include "ferry/plan/synthesis.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace ferry::plan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTol = 1e-9;

struct Sssp {
  std::vector<double> dist;
  std::vector<int> par;  // transition index reaching each state, -1 at sources
};

// Deterministic Dijkstra: the queue orders by (distance, state id), so equal
// cost ties always resolve the same way.
Sssp dijkstra(const ProductAutomaton& p, const std::vector<int>& sources) {
  const int n = p.num_states();
  Sssp r{std::vector<double>(static_cast<size_t>(n), kInf),
         std::vector<int>(static_cast<size_t>(n), -1)};
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  for (int s : sources) {
    r.dist[static_cast<size_t>(s)] = 0.0;
    pq.emplace(0.0, s);
  }
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > r.dist[static_cast<size_t>(u)]) continue;
    for (int ti : p.outgoing[static_cast<size_t>(u)]) {
      const ProductAutomaton::Transition& t =
          p.transitions[static_cast<size_t>(ti)];
      const double nd = d + t.duration;
      if (nd < r.dist[static_cast<size_t>(t.to)]) {
        r.dist[static_cast<size_t>(t.to)] = nd;
        r.par[static_cast<size_t>(t.to)] = ti;
        pq.emplace(nd, t.to);
      }
    }
  }
  return r;
}

std::vector<int> walk_back(const ProductAutomaton& p, const Sssp& s, int to) {
  std::vector<int> path = {to};
  while (s.par[static_cast<size_t>(path.back())] >= 0) {
    const ProductAutomaton::Transition& t =
        p.transitions[static_cast<size_t>(s.par[static_cast<size_t>(
            path.back())])];
    path.push_back(t.from);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

PrefixSuffixPlan synthesize_plan(const ProductAutomaton& p) {
  if (p.initial.empty()) throw PlanError("product has no initial states");
  const Sssp from_init = dijkstra(p, p.initial);

  int best_anchor = -1, best_close = -1;
  double best_total = kInf, best_suffix = kInf;
  Sssp best_cycle;
  for (int c = 0; c < p.num_states(); ++c) {
    if (!p.accepting[static_cast<size_t>(c)]) continue;
    if (from_init.dist[static_cast<size_t>(c)] == kInf) continue;
    Sssp around = dijkstra(p, {c});
    // shortest cycle through c closes with some incoming transition
    double cyc = kInf;
    int close = -1;
    for (size_t ti = 0; ti < p.transitions.size(); ++ti) {
      const ProductAutomaton::Transition& t = p.transitions[ti];
      if (t.to != c) continue;
      const double cost = around.dist[static_cast<size_t>(t.from)] + t.duration;
      if (cost < cyc - kTieTol) {
        cyc = cost;
        close = static_cast<int>(ti);
      }
    }
    if (close < 0) continue;
    const double total = from_init.dist[static_cast<size_t>(c)] + cyc;
    const bool better =
        total < best_total - kTieTol ||
        (total < best_total + kTieTol && cyc < best_suffix - kTieTol);
    if (better) {
      best_anchor = c;
      best_close = close;
      best_total = total;
      best_suffix = cyc;
      best_cycle = std::move(around);
    }
  }
  if (best_anchor < 0)
    throw PlanError(
        "task infeasible on this model: no accepting state lies on a cycle "
        "reachable from an initial state");

  PrefixSuffixPlan plan;
  plan.prefix = walk_back(p, from_init, best_anchor);
  plan.prefix_cost = from_init.dist[static_cast<size_t>(best_anchor)];
  const ProductAutomaton::Transition& close_t =
      p.transitions[static_cast<size_t>(best_close)];
  plan.suffix = walk_back(p, best_cycle, close_t.from);
  plan.suffix_cost = best_suffix;
  return plan;
}

bool plan_satisfies(const PrefixSuffixPlan& plan, const ltl::BuchiAutomaton& a,
                    const std::function<ltl::Letter(int)>& labeling) {
  if (plan.prefix.empty() || plan.suffix.empty())
    throw std::invalid_argument("plan prefix and suffix must be nonempty");
  if (plan.prefix.back() != plan.suffix.front())
    throw std::invalid_argument("suffix must start where the prefix ends");
  ltl::Word head, cycle;
  for (size_t k = 0; k + 1 < plan.prefix.size(); ++k)
    head.push_back(labeling(plan.prefix[k]));
  for (int s : plan.suffix) cycle.push_back(labeling(s));
  return ltl::accepts_lasso(a, head, cycle);
}

}  // namespace ferry::plan
