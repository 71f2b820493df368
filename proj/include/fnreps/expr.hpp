#pragma once

// Expressions over 1, x, literals, π, field operations, sin, cos and max, with a parser.
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := base ('^' natural)?
//   base   := 'x' | number | 'pi' | 'sin' '(' expr ')' | 'cos' '(' expr ')'
//           | 'max' '(' expr ',' expr ')' | '(' expr ')' | '-' base

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "fnreps/real.hpp"

namespace fnreps {

enum class Op { One, X, Lit, Pi, Add, Sub, Mul, Div, Sin, Cos, Max2, Neg };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  Op op;
  Expr a, b;
  std::optional<Dyadic> lit;        // exact literal
  std::optional<CauchyReal> real;   // literal that is not dyadic
  std::string text;                 // literal as written
  std::optional<Dyadic> witness;    // Div: a trusted positive lower bound of the denominator
};

namespace ex {

inline Expr make(Op op, Expr a = nullptr, Expr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}
inline Expr one() { return make(Op::One); }
inline Expr x() { return make(Op::X); }
inline Expr pi() { return make(Op::Pi); }
inline Expr lit(const Dyadic& d) {
  auto n = std::make_shared<Node>();
  n->op = Op::Lit;
  n->lit = d;
  n->text = d.decimal(20);
  return n;
}
inline Expr add(Expr a, Expr b) { return make(Op::Add, std::move(a), std::move(b)); }
inline Expr sub(Expr a, Expr b) { return make(Op::Sub, std::move(a), std::move(b)); }
inline Expr mul(Expr a, Expr b) { return make(Op::Mul, std::move(a), std::move(b)); }
inline Expr div(Expr a, Expr b, std::optional<Dyadic> witness = std::nullopt) {
  auto n = std::make_shared<Node>();
  n->op = Op::Div;
  n->a = std::move(a);
  n->b = std::move(b);
  n->witness = std::move(witness);
  return n;
}
inline Expr sin(Expr a) { return make(Op::Sin, std::move(a)); }
inline Expr cos(Expr a) { return make(Op::Cos, std::move(a)); }
inline Expr max(Expr a, Expr b) { return make(Op::Max2, std::move(a), std::move(b)); }
inline Expr neg(Expr a) { return make(Op::Neg, std::move(a)); }

}  // namespace ex

inline const char* op_name(Op op) {
  switch (op) {
    case Op::One: return "One";
    case Op::X: return "x";
    case Op::Lit: return "Lit";
    case Op::Pi: return "pi";
    case Op::Add: return "Add";
    case Op::Sub: return "Sub";
    case Op::Mul: return "Mul";
    case Op::Div: return "Div";
    case Op::Sin: return "Sin";
    case Op::Cos: return "Cos";
    case Op::Max2: return "Max2";
    case Op::Neg: return "Neg";
  }
  return "?";
}

/// Prefix form such as Add(Sin(Mul(10,x)),Cos(Mul(20,x))).
inline std::string structure(const Expr& e) {
  switch (e->op) {
    case Op::One: return "1";
    case Op::X: return "x";
    case Op::Pi: return "pi";
    case Op::Lit: return e->text;
    default: break;
  }
  std::string s = std::string(op_name(e->op)) + "(" + structure(e->a);
  if (e->b) s += "," + structure(e->b);
  return s + ")";
}

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Expr parse() {
    Expr e = expr();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::ParseError, what + " at position " + std::to_string(i_));
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  bool keyword(std::string_view k) {
    skip();
    if (s_.substr(i_, k.size()) != k) return false;
    std::size_t j = i_ + k.size();
    if (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) return false;
    i_ = j;
    return true;
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (eat('+'))
        e = ex::add(e, term());
      else if (eat('-'))
        e = ex::sub(e, term());
      else
        return e;
    }
  }
  Expr term() {
    Expr e = factor();
    for (;;) {
      if (eat('*'))
        e = ex::mul(e, factor());
      else if (eat('/'))
        e = ex::div(e, factor());
      else
        return e;
    }
  }
  Expr factor() {
    Expr e = base();
    if (!eat('^')) return e;
    skip();
    std::size_t start = i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (start == i_) fail("expected a natural exponent");
    unsigned long k = std::stoul(std::string(s_.substr(start, i_ - start)));
    if (k > 64) fail("exponent too large");
    if (k == 0) return ex::one();
    Expr r = e;
    for (unsigned long j = 1; j < k; ++j) r = ex::mul(r, e);
    return r;
  }
  Expr base() {
    skip();
    if (i_ >= s_.size()) fail("unexpected end of input");
    char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (eat('(')) {
      Expr e = expr();
      expect(')');
      return e;
    }
    if (eat('-')) return ex::neg(base());
    if (keyword("x")) return ex::x();
    if (keyword("pi")) return ex::pi();
    if (keyword("sin")) return unary(ex::sin);
    if (keyword("cos")) return unary(ex::cos);
    if (keyword("max")) {
      expect('(');
      Expr a = expr();
      expect(',');
      Expr b = expr();
      expect(')');
      return ex::max(a, b);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
  Expr unary(Expr (*mk)(Expr)) {
    expect('(');
    Expr a = expr();
    expect(')');
    return mk(a);
  }
  // Decimal literal, exact when its reduced denominator is a power of two.
  Expr number() {
    std::size_t start = i_;
    std::string digits;
    long frac = 0;
    bool dot = false;
    while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.')) {
      if (s_[i_] == '.') {
        if (dot) fail("second decimal point");
        dot = true;
      } else {
        digits += s_[i_];
        if (dot) ++frac;
      }
      ++i_;
    }
    if (digits.empty()) fail("malformed number");
    mpz_class num(digits), den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(frac));
    mpq_class q(num, den);
    q.canonicalize();
    auto n = std::make_shared<Node>();
    n->text = std::string(s_.substr(start, i_ - start));
    mpz_class d = q.get_den();
    if (mpz_popcount(d.get_mpz_t()) == 1) {
      Dyadic v(q.get_num(), -static_cast<std::int64_t>(mpz_sizeinbase(d.get_mpz_t(), 2) - 1));
      if (v == Dyadic(1)) return ex::one();
      n->op = Op::Lit;
      n->lit = v;
    } else {
      n->op = Op::Lit;
      n->real = CauchyReal::from_rational(q.get_num(), d);
    }
    return n;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

}  // namespace detail

/// Parses the grammar above; raises ParseError with the offending position.
inline Expr parse(std::string_view text) { return detail::Parser(text).parse(); }

}  // namespace fnreps
