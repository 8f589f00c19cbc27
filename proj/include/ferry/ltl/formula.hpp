// ============================================================================
// ltl/formula.hpp — LTL abstract syntax trees
//
// Formulas are immutable shared trees.  Negation normal form keeps negation
// on propositions only; Eventually/Always are rewritten to Until/Release.
// ============================================================================
#pragma once

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ferry::ltl {

enum class Op {
  True,
  False,
  Prop,
  Not,
  And,
  Or,
  Implies,
  Next,
  Until,
  Release,
  Eventually,
  Always,
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  Op op;
  std::string prop;  // Op::Prop only
  FormulaPtr lhs;    // unary child or left operand
  FormulaPtr rhs;    // right operand of binary operators
};

FormulaPtr make_true();
FormulaPtr make_false();
FormulaPtr make_prop(std::string name);
FormulaPtr make_not(FormulaPtr f);
FormulaPtr make_and(FormulaPtr a, FormulaPtr b);
FormulaPtr make_or(FormulaPtr a, FormulaPtr b);
FormulaPtr make_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr make_next(FormulaPtr f);
FormulaPtr make_until(FormulaPtr a, FormulaPtr b);
FormulaPtr make_release(FormulaPtr a, FormulaPtr b);
FormulaPtr make_eventually(FormulaPtr f);
FormulaPtr make_always(FormulaPtr f);

/// Total structural order; 0 iff structurally equal.
int compare(const Formula& a, const Formula& b);
int compare(const FormulaPtr& a, const FormulaPtr& b);

struct FormulaLess {
  bool operator()(const FormulaPtr& a, const FormulaPtr& b) const {
    return compare(a, b) < 0;
  }
};

using FormulaSet = std::set<FormulaPtr, FormulaLess>;

bool equal(const FormulaPtr& a, const FormulaPtr& b);

/// ASCII rendering with the surface syntax accepted by parse_ltl.
std::string to_string(const FormulaPtr& f);

/// Negation normal form.  Also expands Implies, Eventually and Always.
FormulaPtr to_nnf(const FormulaPtr& f);

/// Names of all propositions occurring in the formula.
std::set<std::string> propositions(const FormulaPtr& f);

struct ParseError : std::runtime_error {
  size_t offset;
  ParseError(const std::string& msg, size_t off)
      : std::runtime_error(msg), offset(off) {}
};

/// Parses the ASCII surface syntax:
///   []f  <>f  Xf  f U g  f R g  f && g  f || g  !f  f -> g  true false
/// Precedence: unary > U/R > && > || > ->.  Every identifier must be a
/// member of `alphabet`.
FormulaPtr parse_ltl(const std::string& text,
                     const std::set<std::string>& alphabet);

}  // namespace ferry::ltl
