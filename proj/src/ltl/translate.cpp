// Tableau ("expand") translation of LTL to generalized Büchi automata, then
// counter-based degeneralization to a plain NBA.
//
// Tableau nodes carry successor-labeled guards (the literals collected into
// Old).  A fresh initial state is prepended so the resulting automaton reads
// guards on outgoing transitions, matching accepts_lasso.

#include <algorithm>
#include <cassert>
#include <map>
#include <tuple>

#include "ferry/ltl/nba.hpp"

namespace ferry::ltl {

namespace {

bool is_literal(const FormulaPtr& f) {
  return f->op == Op::Prop ||
         (f->op == Op::Not && f->lhs->op == Op::Prop);
}

struct Node {
  int id = 0;
  std::set<int> incoming;  // 0 is the virtual pre-initial node
  FormulaSet news, old, next;
};

struct Tableau {
  std::vector<Node> done;  // closed nodes, in creation order
  int next_id = 1;

  void expand(Node node) {
    if (node.news.empty()) {
      for (Node& r : done) {
        if (sets_equal(r.old, node.old) && sets_equal(r.next, node.next)) {
          r.incoming.insert(node.incoming.begin(), node.incoming.end());
          return;
        }
      }
      node.id = next_id++;
      done.push_back(node);
      Node succ;
      succ.incoming = {node.id};
      succ.news = node.next;
      expand(std::move(succ));
      return;
    }
    FormulaPtr f = *node.news.begin();
    node.news.erase(node.news.begin());
    switch (f->op) {
      case Op::True:
        node.old.insert(f);  // recorded so acceptance sets can see fulfilled
        expand(std::move(node));  // obligations of the form `a U true`
        return;
      case Op::False:
        return;  // contradiction, drop
      case Op::Prop:
      case Op::Not: {
        assert(is_literal(f));
        FormulaPtr negated = f->op == Op::Not ? f->lhs : make_not(f);
        if (node.old.count(negated)) return;  // p and !p
        node.old.insert(f);
        expand(std::move(node));
        return;
      }
      case Op::And: {
        if (!node.old.count(f->lhs)) node.news.insert(f->lhs);
        if (!node.old.count(f->rhs)) node.news.insert(f->rhs);
        node.old.insert(f);
        expand(std::move(node));
        return;
      }
      case Op::Or: {
        Node a = node, b = std::move(node);
        a.old.insert(f);
        b.old.insert(f);
        if (!a.old.count(f->lhs)) a.news.insert(f->lhs);
        if (!b.old.count(f->rhs)) b.news.insert(f->rhs);
        expand(std::move(a));
        expand(std::move(b));
        return;
      }
      case Op::Next: {
        node.old.insert(f);
        node.next.insert(f->lhs);
        expand(std::move(node));
        return;
      }
      case Op::Until: {
        // a U b  =  b  or  (a and X(a U b))
        Node a = node, b = std::move(node);
        a.old.insert(f);
        b.old.insert(f);
        if (!a.old.count(f->lhs)) a.news.insert(f->lhs);
        a.next.insert(f);
        if (!b.old.count(f->rhs)) b.news.insert(f->rhs);
        expand(std::move(a));
        expand(std::move(b));
        return;
      }
      case Op::Release: {
        // a R b  =  (a and b)  or  (b and X(a R b))
        Node a = node, b = std::move(node);
        a.old.insert(f);
        b.old.insert(f);
        if (!a.old.count(f->rhs)) a.news.insert(f->rhs);
        a.next.insert(f);
        if (!b.old.count(f->lhs)) b.news.insert(f->lhs);
        if (!b.old.count(f->rhs)) b.news.insert(f->rhs);
        expand(std::move(a));
        expand(std::move(b));
        return;
      }
      default:
        assert(false && "input must be in negation normal form");
        return;
    }
  }

  static bool sets_equal(const FormulaSet& a, const FormulaSet& b) {
    if (a.size() != b.size()) return false;
    auto it = b.begin();
    for (const auto& f : a) {
      if (!equal(f, *it++)) return false;
    }
    return true;
  }
};

Guard guard_of(const Node& n) {
  Guard g;
  for (const auto& f : n.old) {
    if (f->op == Op::Prop) g.positive.insert(f->prop);
    else if (f->op == Op::Not) g.negative.insert(f->lhs->prop);
  }
  return g;
}

void collect_untils(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
  if (!f) return;
  if (f->op == Op::Until) {
    bool seen = std::any_of(out.begin(), out.end(),
                            [&](const FormulaPtr& g) { return equal(g, f); });
    if (!seen) out.push_back(f);
  }
  collect_untils(f->lhs, out);
  collect_untils(f->rhs, out);
}

}  // namespace

bool Guard::consistent() const {
  for (const auto& p : positive)
    if (negative.count(p)) return false;
  return true;
}

bool Guard::matches(const Letter& letter) const {
  for (const auto& p : positive)
    if (!letter.count(p)) return false;
  for (const auto& n : negative)
    if (letter.count(n)) return false;
  return true;
}

std::vector<std::vector<const NbaTransition*>> BuchiAutomaton::outgoing() const {
  std::vector<std::vector<const NbaTransition*>> out(num_states);
  for (const auto& t : transitions) out[t.from].push_back(&t);
  return out;
}

BuchiAutomaton translate_to_nba(const FormulaPtr& formula) {
  const FormulaPtr f = to_nnf(formula);

  Tableau tab;
  Node root;
  root.incoming = {0};
  root.news.insert(f);
  tab.expand(std::move(root));

  std::vector<FormulaPtr> untils;
  collect_untils(f, untils);
  const int k = static_cast<int>(untils.size());

  // Generalized acceptance: for the i-th Until g = a U b, the i-th set holds
  // the nodes where g is not pending (g not in Old, or b in Old).
  auto in_fset = [&](const Node& n, int i) {
    bool has_g = false, has_b = false;
    for (const auto& h : n.old) {
      if (equal(h, untils[i])) has_g = true;
      if (equal(h, untils[i]->rhs)) has_b = true;
    }
    return !has_g || has_b;
  };

  const int num_nodes = static_cast<int>(tab.done.size());
  BuchiAutomaton nba;
  {
    auto props = propositions(f);
    nba.alphabet.assign(props.begin(), props.end());
  }

  if (k == 0) {
    // No liveness obligations: every tableau node is accepting.
    nba.num_states = num_nodes + 1;  // node ids 1..num_nodes, state 0 initial
    nba.initial = {0};
    for (const Node& n : tab.done) {
      Guard g = guard_of(n);
      for (int from : n.incoming) nba.transitions.push_back({from, g, n.id});
      nba.accepting.insert(n.id);
    }
    return reduce_nba(nba);
  }

  // Degeneralize: states (node, counter); the counter advances when the
  // current node lies in the counter's acceptance set, and a run is accepting
  // iff it infinitely often closes a full counter cycle.
  auto state_id = [&](int node, int counter) {
    return 1 + (node - 1) * k + counter;
  };
  nba.num_states = 1 + num_nodes * k;
  nba.initial = {0};

  std::vector<const Node*> by_id(num_nodes + 1, nullptr);
  for (const Node& n : tab.done) by_id[n.id] = &n;

  for (const Node& n : tab.done) {
    Guard g = guard_of(n);
    for (int from : n.incoming) {
      if (from == 0) {
        nba.transitions.push_back({0, g, state_id(n.id, 0)});
        continue;
      }
      const Node& src = *by_id[from];
      for (int i = 0; i < k; ++i) {
        int j = in_fset(src, i) ? (i + 1) % k : i;
        nba.transitions.push_back({state_id(from, i), g, state_id(n.id, j)});
      }
    }
    if (in_fset(n, 0)) nba.accepting.insert(state_id(n.id, 0));
  }
  return reduce_nba(nba);
}

BuchiAutomaton reduce_nba(const BuchiAutomaton& a) {
  const int n = a.num_states;

  // -- trim: reachable from initial and able to reach an accepting cycle ----
  std::vector<std::vector<int>> out(n), in(n);
  for (size_t ti = 0; ti < a.transitions.size(); ++ti) {
    const NbaTransition& t = a.transitions[ti];
    if (!t.guard.consistent()) continue;
    out[t.from].push_back(static_cast<int>(ti));
    in[t.to].push_back(static_cast<int>(ti));
  }
  auto bfs = [&](const std::vector<int>& seeds,
                 const std::vector<std::vector<int>>& adj, bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack(seeds);
    for (int s : seeds) seen[s] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int ti : adj[u]) {
        const int v = forward ? a.transitions[ti].to : a.transitions[ti].from;
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    return seen;
  };
  const auto reachable =
      bfs({a.initial.begin(), a.initial.end()}, out, /*forward=*/true);

  // accepting states that lie on a cycle (reach themselves via >= 1 edge)
  std::vector<int> live;
  for (int q : a.accepting) {
    std::vector<int> succ;
    for (int ti : out[q]) succ.push_back(a.transitions[ti].to);
    if (bfs(succ, out, /*forward=*/true)[q]) live.push_back(q);
  }
  const auto productive = bfs(live, in, /*forward=*/false);

  std::vector<char> keep(n, 0);
  for (int s = 0; s < n; ++s) keep[s] = reachable[s] && productive[s];
  for (int s : a.initial) keep[s] = 1;  // keep the initial core even when
                                        // the language is empty

  // -- direct bisimulation quotient ----------------------------------------
  // signature = (class, sorted multiset of (guard, successor class)); refine
  // until the partition is stable.  Acceptance seeds the initial partition.
  std::vector<int> cls(n, -1);
  for (int s = 0; s < n; ++s)
    if (keep[s]) cls[s] = a.accepting.count(s) ? 1 : 0;
  using Edge = std::tuple<std::vector<std::string>, std::vector<std::string>,
                          int>;  // positive, negative, class
  for (;;) {
    std::map<std::pair<int, std::set<Edge>>, int> sig_ids;
    std::vector<int> next(n, -1);
    for (int s = 0; s < n; ++s) {
      if (!keep[s]) continue;
      std::set<Edge> sig;
      for (int ti : out[s]) {
        const NbaTransition& t = a.transitions[ti];
        if (!keep[t.to]) continue;
        sig.insert({{t.guard.positive.begin(), t.guard.positive.end()},
                    {t.guard.negative.begin(), t.guard.negative.end()},
                    cls[t.to]});
      }
      auto key = std::make_pair(cls[s], std::move(sig));
      auto [it, inserted] = sig_ids.try_emplace(std::move(key),
                                                static_cast<int>(sig_ids.size()));
      next[s] = it->second;
    }
    bool changed = false;
    for (int s = 0; s < n && !changed; ++s)
      if (keep[s])
        for (int r = 0; r < s; ++r)
          if (keep[r] && ((cls[r] == cls[s]) != (next[r] == next[s]))) {
            changed = true;
            break;
          }
    cls = std::move(next);
    if (!changed) break;
  }

  // -- rebuild over classes, dropping duplicate and subsumed guards --------
  std::map<int, int> renum;
  for (int s = 0; s < n; ++s)
    if (keep[s]) renum.try_emplace(cls[s], static_cast<int>(renum.size()));

  BuchiAutomaton r;
  r.alphabet = a.alphabet;
  r.num_states = static_cast<int>(renum.size());
  for (int s : a.initial) r.initial.insert(renum.at(cls[s]));
  for (int s : a.accepting)
    if (keep[s]) r.accepting.insert(renum.at(cls[s]));

  std::map<std::pair<int, int>, std::vector<Guard>> guards;
  std::vector<char> done_class(renum.size(), 0);
  for (int s = 0; s < n; ++s) {
    if (!keep[s]) continue;
    const int c = renum.at(cls[s]);
    if (done_class[c]) continue;  // bisimilar states share their signature
    done_class[c] = 1;
    for (int ti : out[s]) {
      const NbaTransition& t = a.transitions[ti];
      if (!keep[t.to]) continue;
      guards[{c, renum.at(cls[t.to])}].push_back(t.guard);
    }
  }
  auto subsumes = [](const Guard& g, const Guard& h) {  // L(h) ⊆ L(g)
    return std::includes(h.positive.begin(), h.positive.end(),
                         g.positive.begin(), g.positive.end()) &&
           std::includes(h.negative.begin(), h.negative.end(),
                         g.negative.begin(), g.negative.end());
  };
  for (auto& [edge, gs] : guards) {
    for (size_t i = 0; i < gs.size(); ++i) {
      bool redundant = false;
      for (size_t j = 0; j < gs.size() && !redundant; ++j)
        redundant = i != j && subsumes(gs[j], gs[i]) &&
                    !(subsumes(gs[i], gs[j]) && j > i);
      if (!redundant) r.transitions.push_back({edge.first, gs[i], edge.second});
    }
  }
  return r;
}

}  // namespace ferry::ltl
