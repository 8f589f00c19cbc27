// Test-only oracles, independent of the library's implementation paths:
//  - a semantic LTL evaluator over ultimately periodic words
//  - random formula / word generators
//  - Floyd–Warshall based lasso-cost oracle for product automata
#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ferry/ltl/formula.hpp"
#include "ferry/ltl/nba.hpp"

namespace oracles {

using ferry::ltl::Formula;
using ferry::ltl::FormulaPtr;
using ferry::ltl::Letter;
using ferry::ltl::Op;
using ferry::ltl::Word;

// Evaluates f on the infinite word prefix . cycle^w by fixpoint iteration
// over the finitely many distinct positions of the lasso.
inline bool eval_lasso(const FormulaPtr& f, const Word& prefix,
                       const Word& cycle) {
  const int P = static_cast<int>(prefix.size());
  const int L = P + static_cast<int>(cycle.size());
  auto letter_at = [&](int k) -> const Letter& {
    return k < P ? prefix[k] : cycle[k - P];
  };
  auto succ = [&](int k) { return k + 1 < L ? k + 1 : P; };

  std::function<std::vector<bool>(const FormulaPtr&)> eval =
      [&](const FormulaPtr& g) -> std::vector<bool> {
    std::vector<bool> v(L, false);
    switch (g->op) {
      case Op::True:
        v.assign(L, true);
        break;
      case Op::False:
        break;
      case Op::Prop:
        for (int k = 0; k < L; ++k) v[k] = letter_at(k).count(g->prop) > 0;
        break;
      case Op::Not: {
        auto a = eval(g->lhs);
        for (int k = 0; k < L; ++k) v[k] = !a[k];
        break;
      }
      case Op::And: {
        auto a = eval(g->lhs), b = eval(g->rhs);
        for (int k = 0; k < L; ++k) v[k] = a[k] && b[k];
        break;
      }
      case Op::Or: {
        auto a = eval(g->lhs), b = eval(g->rhs);
        for (int k = 0; k < L; ++k) v[k] = a[k] || b[k];
        break;
      }
      case Op::Implies: {
        auto a = eval(g->lhs), b = eval(g->rhs);
        for (int k = 0; k < L; ++k) v[k] = !a[k] || b[k];
        break;
      }
      case Op::Next: {
        auto a = eval(g->lhs);
        for (int k = 0; k < L; ++k) v[k] = a[succ(k)];
        break;
      }
      case Op::Until: {
        auto a = eval(g->lhs), b = eval(g->rhs);
        bool changed = true;  // least fixpoint of v = b or (a and Xv)
        while (changed) {
          changed = false;
          for (int k = L - 1; k >= 0; --k) {
            bool nv = b[k] || (a[k] && v[succ(k)]);
            if (nv != v[k]) {
              v[k] = nv;
              changed = true;
            }
          }
        }
        break;
      }
      case Op::Release: {
        auto a = eval(g->lhs), b = eval(g->rhs);
        v.assign(L, true);  // greatest fixpoint of v = b and (a or Xv)
        bool changed = true;
        while (changed) {
          changed = false;
          for (int k = L - 1; k >= 0; --k) {
            bool nv = b[k] && (a[k] || v[succ(k)]);
            if (nv != v[k]) {
              v[k] = nv;
              changed = true;
            }
          }
        }
        break;
      }
      case Op::Eventually: {
        auto a = eval(g->lhs);
        bool changed = true;
        while (changed) {
          changed = false;
          for (int k = L - 1; k >= 0; --k) {
            bool nv = a[k] || v[succ(k)];
            if (nv != v[k]) {
              v[k] = nv;
              changed = true;
            }
          }
        }
        break;
      }
      case Op::Always: {
        auto a = eval(g->lhs);
        v.assign(L, true);
        bool changed = true;
        while (changed) {
          changed = false;
          for (int k = L - 1; k >= 0; --k) {
            bool nv = a[k] && v[succ(k)];
            if (nv != v[k]) {
              v[k] = nv;
              changed = true;
            }
          }
        }
        break;
      }
    }
    return v;
  };
  return eval(f)[0];
}

inline FormulaPtr random_formula(std::mt19937& rng,
                                 const std::vector<std::string>& props,
                                 int depth) {
  using namespace ferry::ltl;
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 10);
  switch (pick(rng)) {
    case 0: return make_prop(props[rng() % props.size()]);
    case 1: return make_true();
    case 2: return make_prop(props[rng() % props.size()]);
    case 3: return make_not(random_formula(rng, props, depth - 1));
    case 4:
      return make_and(random_formula(rng, props, depth - 1),
                      random_formula(rng, props, depth - 1));
    case 5:
      return make_or(random_formula(rng, props, depth - 1),
                     random_formula(rng, props, depth - 1));
    case 6: return make_next(random_formula(rng, props, depth - 1));
    case 7:
      return make_until(random_formula(rng, props, depth - 1),
                        random_formula(rng, props, depth - 1));
    case 8:
      return make_release(random_formula(rng, props, depth - 1),
                          random_formula(rng, props, depth - 1));
    case 9: return make_eventually(random_formula(rng, props, depth - 1));
    default: return make_always(random_formula(rng, props, depth - 1));
  }
}

inline Word random_word(std::mt19937& rng,
                        const std::vector<std::string>& props, int min_len,
                        int max_len) {
  std::uniform_int_distribution<int> len_dist(min_len, max_len);
  Word w(len_dist(rng));
  for (auto& letter : w)
    for (const auto& p : props)
      if (rng() % 2) letter.insert(p);
  return w;
}

}  // namespace oracles
