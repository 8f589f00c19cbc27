// ============================================================================
// plan/synthesis.hpp — minimum-cost prefix–suffix plans over a product
//
// A plan is a finite prefix from an initial product state to an accepting
// one plus a cycle (suffix) through that accepting state; the synthesizer
// minimizes prefix_cost + suffix_cost over all accepting lassos.
// ============================================================================
#pragma once

#include <functional>

#include "ferry/plan/product.hpp"

namespace ferry::plan {

struct PrefixSuffixPlan {
  // Product state ids.  prefix runs from an initial state to the accepting
  // anchor (inclusive); suffix starts at that anchor and its last state has
  // an edge closing the cycle back to the anchor.
  std::vector<int> prefix;
  std::vector<int> suffix;
  double prefix_cost = 0.0;
  double suffix_cost = 0.0;
};

/// Minimum-cost accepting lasso: multi-source shortest paths from the initial
/// set combined with, per accepting state, the shortest cycle through it.
/// Ties break toward the smaller suffix cost, then lexicographically smaller
/// (prefix, suffix) state sequences.  Throws PlanError when no accepting
/// state lies on a cycle reachable from the initial set.
PrefixSuffixPlan synthesize_plan(const ProductAutomaton& p);

/// True iff the labeled trace prefix·suffix^ω is accepted by the automaton.
/// `labeling` maps a product state id to the letter it emits.  Throws
/// std::invalid_argument for an empty prefix/suffix or when the suffix does
/// not start where the prefix ends.
bool plan_satisfies(const PrefixSuffixPlan& plan, const ltl::BuchiAutomaton& a,
                    const std::function<ltl::Letter(int)>& labeling);

}  // namespace ferry::plan
