// Recursive-descent parser for the ASCII LTL surface syntax.
//
//   implies := or ('->' implies)?                (right associative)
//   or      := and ('||' and)*
//   and     := until ('&&' until)*
//   until   := unary (('U'|'R') unary)*          (left associative)
//   unary   := '!' unary | 'X' unary | '<>' unary | '[]' unary
//            | '(' implies ')' | 'true' | 'false' | ident

#include <cctype>

#include "ferry/ltl/formula.hpp"

namespace ferry::ltl {

namespace {

class Parser {
 public:
  Parser(const std::string& text, const std::set<std::string>& alphabet)
      : text_(text), alphabet_(alphabet) {}

  FormulaPtr run() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty formula", pos_);
    FormulaPtr f = implies();
    skip_ws();
    if (pos_ < text_.size())
      throw ParseError("unexpected trailing input", pos_);
    return f;
  }

 private:
  FormulaPtr implies() {
    FormulaPtr lhs = or_expr();
    if (eat("->")) return make_implies(lhs, implies());
    return lhs;
  }

  FormulaPtr or_expr() {
    FormulaPtr f = and_expr();
    while (eat("||")) f = make_or(f, and_expr());
    return f;
  }

  FormulaPtr and_expr() {
    FormulaPtr f = until_expr();
    while (eat("&&")) f = make_and(f, until_expr());
    return f;
  }

  FormulaPtr until_expr() {
    FormulaPtr f = unary();
    for (;;) {
      if (eat_keyword("U")) f = make_until(f, unary());
      else if (eat_keyword("R")) f = make_release(f, unary());
      else return f;
    }
  }

  FormulaPtr unary() {
    skip_ws();
    if (eat("!")) return make_not(unary());
    if (eat("<>")) return make_eventually(unary());
    if (eat("[]")) return make_always(unary());
    if (eat_keyword("X")) return make_next(unary());
    if (eat("(")) {
      FormulaPtr f = implies();
      if (!eat(")")) throw ParseError("expected ')'", pos_);
      return f;
    }
    return atom();
  }

  FormulaPtr atom() {
    skip_ws();
    size_t start = pos_;
    if (pos_ >= text_.size() || !(std::isalpha(text_[pos_]) || text_[pos_] == '_'))
      throw ParseError("expected formula", pos_);
    while (pos_ < text_.size() &&
           (std::isalnum(text_[pos_]) || text_[pos_] == '_'))
      ++pos_;
    std::string name = text_.substr(start, pos_ - start);
    if (name == "true") return make_true();
    if (name == "false") return make_false();
    if (!alphabet_.count(name))
      throw ParseError("unknown proposition '" + name + "'", start);
    return make_prop(std::move(name));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(text_[pos_])) ++pos_;
  }

  bool eat(const std::string& tok) {
    skip_ws();
    if (text_.compare(pos_, tok.size(), tok) == 0) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  // A keyword must not be followed by an identifier character, so that a
  // proposition named "Up" is not parsed as `U p`.
  bool eat_keyword(const std::string& tok) {
    skip_ws();
    if (text_.compare(pos_, tok.size(), tok) != 0) return false;
    size_t end = pos_ + tok.size();
    if (end < text_.size() &&
        (std::isalnum(text_[end]) || text_[end] == '_'))
      return false;
    pos_ = end;
    return true;
  }

  const std::string& text_;
  const std::set<std::string>& alphabet_;
  size_t pos_ = 0;
};

}  // namespace

FormulaPtr parse_ltl(const std::string& text,
                     const std::set<std::string>& alphabet) {
  return Parser(text, alphabet).run();
}

}  // namespace ferry::ltl
