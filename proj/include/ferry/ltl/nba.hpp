// ============================================================================
// ltl/nba.hpp — nondeterministic Büchi automata with symbolic guards
//
// Guards are sets of positive/negative literals; a guard matches every
// letter (subset of AP) that contains all positive literals and none of the
// negative ones.  This keeps automata far smaller than explicit 2^AP edges.
// ============================================================================
#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ferry/ltl/formula.hpp"

namespace ferry::ltl {

using Letter = std::set<std::string>;
using Word = std::vector<Letter>;

struct Guard {
  std::set<std::string> positive;
  std::set<std::string> negative;

  bool consistent() const;
  bool matches(const Letter& letter) const;
  bool operator==(const Guard&) const = default;
};

struct NbaTransition {
  int from = 0;
  Guard guard;
  int to = 0;
};

struct BuchiAutomaton {
  int num_states = 0;
  std::vector<std::string> alphabet;
  std::vector<NbaTransition> transitions;
  std::set<int> initial;
  std::set<int> accepting;

  std::vector<std::vector<const NbaTransition*>> outgoing() const;
};

/// Tableau construction (expand/cover) followed by degeneralization of the
/// generalized acceptance sets.  Input is normalized internally.
BuchiAutomaton translate_to_nba(const FormulaPtr& f);

/// Language-preserving simplification: drops states that are unreachable or
/// cannot reach an accepting cycle, merges direct-bisimilar states, and
/// removes duplicate or subsumed guards between the same state pair.
BuchiAutomaton reduce_nba(const BuchiAutomaton& a);

/// Decides whether prefix·cycle^ω is accepted.  Cycle must be nonempty.
bool accepts_lasso(const BuchiAutomaton& a, const Word& prefix,
                   const Word& cycle);

/// Debug serialization (states, guarded transitions, initial, accepting).
std::string nba_to_json(const BuchiAutomaton& a);

}  // namespace ferry::ltl
