#include "ferry/ltl/formula.hpp"

#include <cassert>
#include <sstream>

namespace ferry::ltl {

namespace {
FormulaPtr node(Op op, std::string prop, FormulaPtr l, FormulaPtr r) {
  auto f = std::make_shared<Formula>();
  f->op = op;
  f->prop = std::move(prop);
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  return f;
}
}  // namespace

FormulaPtr make_true() { return node(Op::True, {}, nullptr, nullptr); }
FormulaPtr make_false() { return node(Op::False, {}, nullptr, nullptr); }
FormulaPtr make_prop(std::string name) {
  return node(Op::Prop, std::move(name), nullptr, nullptr);
}
FormulaPtr make_not(FormulaPtr f) {
  return node(Op::Not, {}, std::move(f), nullptr);
}
FormulaPtr make_and(FormulaPtr a, FormulaPtr b) {
  return node(Op::And, {}, std::move(a), std::move(b));
}
FormulaPtr make_or(FormulaPtr a, FormulaPtr b) {
  return node(Op::Or, {}, std::move(a), std::move(b));
}
FormulaPtr make_implies(FormulaPtr a, FormulaPtr b) {
  return node(Op::Implies, {}, std::move(a), std::move(b));
}
FormulaPtr make_next(FormulaPtr f) {
  return node(Op::Next, {}, std::move(f), nullptr);
}
FormulaPtr make_until(FormulaPtr a, FormulaPtr b) {
  return node(Op::Until, {}, std::move(a), std::move(b));
}
FormulaPtr make_release(FormulaPtr a, FormulaPtr b) {
  return node(Op::Release, {}, std::move(a), std::move(b));
}
FormulaPtr make_eventually(FormulaPtr f) {
  return node(Op::Eventually, {}, std::move(f), nullptr);
}
FormulaPtr make_always(FormulaPtr f) {
  return node(Op::Always, {}, std::move(f), nullptr);
}

int compare(const Formula& a, const Formula& b) {
  if (a.op != b.op) return static_cast<int>(a.op) < static_cast<int>(b.op) ? -1 : 1;
  if (a.op == Op::Prop) return a.prop.compare(b.prop);
  if (a.lhs || b.lhs) {
    if (!a.lhs) return -1;
    if (!b.lhs) return 1;
    if (int c = compare(*a.lhs, *b.lhs)) return c;
  }
  if (a.rhs || b.rhs) {
    if (!a.rhs) return -1;
    if (!b.rhs) return 1;
    if (int c = compare(*a.rhs, *b.rhs)) return c;
  }
  return 0;
}

int compare(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return 0;
  return compare(*a, *b);
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) { return compare(a, b) == 0; }

namespace {

int precedence(Op op) {
  switch (op) {
    case Op::Implies: return 1;
    case Op::Or: return 2;
    case Op::And: return 3;
    case Op::Until:
    case Op::Release: return 4;
    default: return 5;  // unary and atoms
  }
}

void print(const FormulaPtr& f, int parent_prec, std::ostringstream& out) {
  const int prec = precedence(f->op);
  const bool paren = prec < parent_prec ||
                     // binary operators of equal precedence are always
                     // parenthesized so the printed form is unambiguous
                     (prec == parent_prec && prec <= 4 && f->rhs);
  if (paren) out << '(';
  switch (f->op) {
    case Op::True: out << "true"; break;
    case Op::False: out << "false"; break;
    case Op::Prop: out << f->prop; break;
    case Op::Not:
      out << '!';
      print(f->lhs, 5, out);
      break;
    case Op::Next:
      out << "X ";
      print(f->lhs, 5, out);
      break;
    case Op::Eventually:
      out << "<>";
      print(f->lhs, 5, out);
      break;
    case Op::Always:
      out << "[]";
      print(f->lhs, 5, out);
      break;
    case Op::And:
      print(f->lhs, prec + 1, out);
      out << " && ";
      print(f->rhs, prec + 1, out);
      break;
    case Op::Or:
      print(f->lhs, prec + 1, out);
      out << " || ";
      print(f->rhs, prec + 1, out);
      break;
    case Op::Implies:
      print(f->lhs, prec + 1, out);
      out << " -> ";
      print(f->rhs, prec + 1, out);
      break;
    case Op::Until:
      print(f->lhs, prec + 1, out);
      out << " U ";
      print(f->rhs, prec + 1, out);
      break;
    case Op::Release:
      print(f->lhs, prec + 1, out);
      out << " R ";
      print(f->rhs, prec + 1, out);
      break;
  }
  if (paren) out << ')';
}

FormulaPtr nnf(const FormulaPtr& f, bool negated);

FormulaPtr nnf_not(const FormulaPtr& f) { return nnf(f, true); }

FormulaPtr nnf(const FormulaPtr& f, bool negated) {
  switch (f->op) {
    case Op::True: return negated ? make_false() : make_true();
    case Op::False: return negated ? make_true() : make_false();
    case Op::Prop: return negated ? make_not(f) : f;
    case Op::Not: return nnf(f->lhs, !negated);
    case Op::And:
      return negated ? make_or(nnf_not(f->lhs), nnf_not(f->rhs))
                     : make_and(nnf(f->lhs, false), nnf(f->rhs, false));
    case Op::Or:
      return negated ? make_and(nnf_not(f->lhs), nnf_not(f->rhs))
                     : make_or(nnf(f->lhs, false), nnf(f->rhs, false));
    case Op::Implies:
      // a -> b  ==  !a || b
      return negated ? make_and(nnf(f->lhs, false), nnf_not(f->rhs))
                     : make_or(nnf_not(f->lhs), nnf(f->rhs, false));
    case Op::Next: return make_next(nnf(f->lhs, negated));
    case Op::Until:
      return negated ? make_release(nnf_not(f->lhs), nnf_not(f->rhs))
                     : make_until(nnf(f->lhs, false), nnf(f->rhs, false));
    case Op::Release:
      return negated ? make_until(nnf_not(f->lhs), nnf_not(f->rhs))
                     : make_release(nnf(f->lhs, false), nnf(f->rhs, false));
    case Op::Eventually:
      // <>f == true U f,  ![]f == <>!f handled by duality
      return negated ? make_release(make_false(), nnf_not(f->lhs))
                     : make_until(make_true(), nnf(f->lhs, false));
    case Op::Always:
      return negated ? make_until(make_true(), nnf_not(f->lhs))
                     : make_release(make_false(), nnf(f->lhs, false));
  }
  assert(false);
  return nullptr;
}

void collect_props(const FormulaPtr& f, std::set<std::string>& out) {
  if (!f) return;
  if (f->op == Op::Prop) out.insert(f->prop);
  collect_props(f->lhs, out);
  collect_props(f->rhs, out);
}

}  // namespace

std::string to_string(const FormulaPtr& f) {
  std::ostringstream out;
  print(f, 0, out);
  return out.str();
}

FormulaPtr to_nnf(const FormulaPtr& f) { return nnf(f, false); }

std::set<std::string> propositions(const FormulaPtr& f) {
  std::set<std::string> out;
  collect_props(f, out);
  return out;
}

}  // namespace ferry::ltl
