#pragma once

// Compositional evaluation strategies: every expression node is evaluated with the
// matching operation of one representation, bottom-up.

#include <array>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <variant>

#include "fnreps/expr.hpp"
#include "fnreps/frac.hpp"
#include "fnreps/fun.hpp"
#include "fnreps/local.hpp"
#include "fnreps/poly_ops.hpp"
#include "fnreps/ppoly_ops.hpp"

namespace fnreps {

enum class Strategy { Fun, BFun, DBFun, Poly, PPoly, Frac, LPoly, LPPoly };

inline constexpr std::array<Strategy, 8> kAllStrategies{Strategy::Fun,  Strategy::BFun,  Strategy::DBFun,
                                                        Strategy::Poly, Strategy::PPoly, Strategy::Frac,
                                                        Strategy::LPoly, Strategy::LPPoly};

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Fun: return "fun";
    case Strategy::BFun: return "bfun";
    case Strategy::DBFun: return "dbfun";
    case Strategy::Poly: return "poly";
    case Strategy::PPoly: return "ppoly";
    case Strategy::Frac: return "frac";
    case Strategy::LPoly: return "lpoly";
    case Strategy::LPPoly: return "lppoly";
  }
  return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view s) {
  for (Strategy t : kAllStrategies)
    if (s == strategy_name(t)) return t;
  return std::nullopt;
}

/// Evaluates e bottom-up with the operations of `alg`; shared subtrees are evaluated once.
template <class Alg>
typename Alg::Value eval_with(const Expr& e, Alg& alg) {
  using V = typename Alg::Value;
  std::unordered_map<const Node*, V> memo;
  auto go = [&](auto& self, const Expr& n) -> V {
    if (auto it = memo.find(n.get()); it != memo.end()) return it->second;
    V v = [&]() -> V {
      switch (n->op) {
        case Op::One: return alg.lit(Dyadic(1));
        case Op::X: return alg.x();
        case Op::Lit: return n->lit ? alg.lit(*n->lit) : alg.real(*n->real);
        case Op::Pi: return alg.real(CauchyReal::pi());
        case Op::Add: return alg.add(self(self, n->a), self(self, n->b));
        case Op::Sub: return alg.sub(self(self, n->a), self(self, n->b));
        case Op::Mul: return alg.mul(self(self, n->a), self(self, n->b));
        case Op::Div: return alg.div(self(self, n->a), self(self, n->b), n->witness);
        case Op::Sin: return alg.sin(self(self, n->a));
        case Op::Cos: return alg.cos(self(self, n->a));
        case Op::Max2: return alg.max(self(self, n->a), self(self, n->b));
        case Op::Neg: return alg.neg(self(self, n->a));
      }
      throw Error(Errc::Unsupported, "unknown node");
    }();
    memo.emplace(n.get(), v);
    return v;
  };
  return go(go, e);
}

namespace alg {

struct BFunAlg {
  using Value = BFun;
  Value x() { return bfun_x(); }
  Value lit(const Dyadic& d) { return bfun_const(d); }
  Value real(const CauchyReal& r) { return bfun_const(r); }
  Value add(const Value& a, const Value& b) { return a + b; }
  Value sub(const Value& a, const Value& b) { return a - b; }
  Value mul(const Value& a, const Value& b) { return a * b; }
  Value div(const Value& a, const Value& b, const std::optional<Dyadic>&) { return a / b; }
  Value neg(const Value& a) { return -a; }
  Value sin(const Value& a) { return fnreps::sin(a); }
  Value cos(const Value& a) { return fnreps::cos(a); }
  Value max(const Value& a, const Value& b) { return fnreps::max(a, b); }
};

struct DBFunAlg {
  using Value = DBFun;
  Value x() { return dbfun_x(); }
  Value lit(const Dyadic& d) { return dbfun_const(d); }
  Value real(const CauchyReal& r) { return dbfun_const(r); }
  Value add(const Value& a, const Value& b) { return a + b; }
  Value sub(const Value& a, const Value& b) { return a - b; }
  Value mul(const Value& a, const Value& b) { return a * b; }
  Value div(const Value& a, const Value& b, const std::optional<Dyadic>&) { return a / b; }
  Value neg(const Value& a) { return -a; }
  Value sin(const Value& a) { return fnreps::sin(a); }
  Value cos(const Value& a) { return fnreps::cos(a); }
  Value max(const Value& a, const Value& b) { return fnreps::max(a, b); }
};

// Power of two s with s·lb ≥ 1.
inline Dyadic lift_to_one(const Dyadic& lb) {
  return Dyadic::pow2(std::max<std::int64_t>(0, -lb.floor_log2()));
}

// Positive lower bound of a function from range maximisation of its negation, refined until
// it separates from 0; `neg_max(k)` encloses max(−g) to about 2^-k.
template <class F>
Dyadic positive_lower_bound(const std::optional<Dyadic>& witness, F neg_max) {
  if (witness) {
    if (witness->sign() <= 0) throw Error(Errc::BadWitness, "division witness must be positive");
    return *witness;
  }
  for (std::int64_t k = 8; k <= 128; k *= 2) {
    Ball m = neg_max(k);
    if (m.hi().sign() < 0) return -m.hi();
    if (m.lo().sign() >= 0) break;
  }
  throw Error(Errc::NotBoundedBelow, "denominator is not certified positive");
}

/// Chebyshev enclosures on [-1,1] in the variable u, with x = xv(u).
struct PolyAlg {
  using Value = ChebEnclosure;
  std::int64_t n;
  ChebEnclosure xv = ChebEnclosure::basis(1);

  Value x() { return xv; }
  Value lit(const Dyadic& d) { return ChebEnclosure(d); }
  Value real(const CauchyReal& r) {
    Ball b = r.query(n + 4);
    ChebEnclosure c(b.center());
    c.err = b.radius();
    return c;
  }
  Value add(const Value& a, const Value& b) { return size_reduce(a + b, n); }
  Value sub(const Value& a, const Value& b) { return size_reduce(a - b, n); }
  Value mul(const Value& a, const Value& b) { return size_reduce(a * b, n); }
  Value neg(const Value& a) { return -a; }
  Value sin(const Value& a) { return cheb_sin(a, n); }
  Value cos(const Value& a) { return cheb_cos(a, n); }
  Value max(const Value& a, const Value& b) { return cheb_max2(a, b, n); }
  Value div(const Value& a, const Value& b, const std::optional<Dyadic>& w) {
    Dyadic lb = positive_lower_bound(w, [&](std::int64_t k) {
      return cheb_range_max(-b, Ball(Dyadic(-1)), Ball(Dyadic(1)), k);
    });
    Dyadic s = lift_to_one(lb);
    std::int64_t k = s.floor_log2(), sa = std::max<std::int64_t>(0, sup_bound(a).ceil_log2());
    ChebEnclosure q = cheb_scale(cheb_recip(cheb_scale(b, s), n + k + sa + 2), s);
    return size_reduce(a * q, n);
  }
};

/// Piecewise polynomials on the domain of xv.
struct PPolyAlg {
  using Value = PPoly;
  std::int64_t n;
  PPoly xv = PPoly::identity();

  Value x() { return xv; }
  Value lit(const Dyadic& d) { return PPoly::constant(d, xv.lo(), xv.hi()); }
  Value real(const CauchyReal& r) {
    Ball b = r.query(n + 4);
    return PPoly::constant(b.center(), xv.lo(), xv.hi()).widened(b.radius());
  }
  Value add(const Value& a, const Value& b) { return pp_size_reduce(pp_add(a, b, n + 2), n); }
  Value sub(const Value& a, const Value& b) { return pp_size_reduce(pp_sub(a, b, n + 2), n); }
  Value mul(const Value& a, const Value& b) { return pp_mul(a, b, n); }
  Value neg(const Value& a) { return pp_neg(a); }
  Value sin(const Value& a) {
    return detail::map(a, [this](const ChebEnclosure& p) { return cheb_sin(p, n); });
  }
  Value cos(const Value& a) {
    return detail::map(a, [this](const ChebEnclosure& p) { return cheb_cos(p, n); });
  }
  Value max(const Value& a, const Value& b) { return pp_max2(a, b, n); }
  Value div(const Value& a, const Value& b, const std::optional<Dyadic>& w) {
    Dyadic lb = positive_lower_bound(w, [&](std::int64_t k) {
      return pp_range_max(pp_neg(b), Ball(b.lo()), Ball(b.hi()), k);
    });
    Dyadic s = lift_to_one(lb);
    std::int64_t k = s.floor_log2(), sa = 0;
    for (const auto& pc : a.pieces) sa = std::max<std::int64_t>(sa, sup_bound(pc.p).ceil_log2());
    PPoly q = pp_scale(pp_divide(pp_scale(b, s), n + k + sa + 2), s);
    return pp_mul(a, q, n);
  }
};

/// Rational functions. max and trigonometric functions of genuine fractions are not offered.
struct FracAlg {
  using Value = Frac;
  std::int64_t n;

  Value x() { return Frac::polynomial({Dyadic(), Dyadic(1)}); }
  Value lit(const Dyadic& d) { return Frac::polynomial({d}); }
  Value real(const CauchyReal& r) {
    Ball b = r.query(n + 4);
    return Frac::polynomial({b.center()}, b.radius());
  }
  Value add(const Value& a, const Value& b) { return frac_add(a, b); }
  Value sub(const Value& a, const Value& b) { return frac_sub(a, b); }
  Value mul(const Value& a, const Value& b) { return frac_mul(a, b); }
  Value neg(const Value& a) { return frac_neg(a); }
  Value sin(const Value& a) { return trig(a, true); }
  Value cos(const Value& a) { return trig(a, false); }
  Value max(const Value&, const Value&) { throw Error(Errc::Unsupported, "max is not available for frac"); }
  Value div(const Value& a, const Value& b, const std::optional<Dyadic>& w) {
    Dyadic lb = positive_lower_bound(w, [&](std::int64_t k) {
      return frac_range_max(frac_neg(b), Ball(Dyadic(-1)), Ball(Dyadic(1)), k);
    });
    Frac s = Frac::polynomial({lift_to_one(lb)});
    return frac_div(frac_mul(a, s), frac_mul(b, s));
  }

 private:
  // sin/cos of a polynomial through its Chebyshev form, converted back exactly.
  Value trig(const Value& a, bool is_sin) {
    if (a.den() != DyPoly{Dyadic(1)})
      throw Error(Errc::Unsupported, "sin/cos of a non-polynomial fraction is not available for frac");
    ChebEnclosure p = from_power_basis(a.num());
    p.err = a.err();
    ChebEnclosure r = is_sin ? cheb_sin(p, n) : cheb_cos(p, n);
    return Frac::polynomial(to_power_basis(r.center()).to_dyadics(), r.err);
  }
};

}  // namespace alg

inline BFun eval_bfun(const Expr& e) {
  alg::BFunAlg a;
  return eval_with(e, a);
}
inline DBFun eval_dbfun(const Expr& e) {
  alg::DBFunAlg a;
  return eval_with(e, a);
}
inline ChebEnclosure eval_poly(const Expr& e, std::int64_t n, const ChebEnclosure& xv = ChebEnclosure::basis(1)) {
  alg::PolyAlg a{n, xv};
  return eval_with(e, a);
}
inline PPoly eval_ppoly(const Expr& e, std::int64_t n, const PPoly& xv = PPoly::identity()) {
  alg::PPolyAlg a{n, xv};
  return eval_with(e, a);
}
inline Frac eval_frac(const Expr& e, std::int64_t n) {
  alg::FracAlg a{n};
  return eval_with(e, a);
}

/// A sup bound of |f'| over [-1,1] from the derivative extension, splitting the domain until
/// ball division stops failing.
inline Dyadic derivative_bound(const DBFun& f) {
  for (std::int64_t j = 0; j <= 12; ++j) {
    Dyadic bound;
    bool ok = true;
    std::int64_t parts = std::int64_t{1} << j;
    for (std::int64_t i = 0; i < parts && ok; ++i) {
      Dyadic lo = Dyadic(-1) + Dyadic(2 * i).shifted(-j), hi = Dyadic(-1) + Dyadic(2 * i + 2).shifted(-j);
      auto v = detail::try_eval(f.derivative, Ball::from_interval(lo, hi), 32);
      if (!v)
        ok = false;
      else
        bound = max(bound, v->mag());
    }
    if (ok) return bound;
  }
  throw Error(Errc::NotBoundedBelow, "no derivative bound: a denominator could not be separated from 0");
}

/// The Fun name: point samples of the DBFun value plus a Lipschitz modulus from its derivative.
inline FunName eval_fun(const Expr& e) {
  DBFun f = eval_dbfun(e);
  Dyadic L = derivative_bound(f);
  std::int64_t l = L.is_zero() ? 0 : std::max<std::int64_t>(0, L.ceil_log2());
  BFun v = f.value;
  auto sample = [v](const Dyadic& x, std::int64_t n) {
    Dyadic target = Dyadic::pow2(-n);
    for (std::int64_t p = n + 8;; p += 16) {
      Ball b = v(Ball(x), p);
      if (b.radius() <= target) return b;
      if (p > n + 1024) throw Error(Errc::Timeout, "sample did not reach the requested accuracy");
    }
  };
  // |x − y| < 2^-(n+l+1) gives |f(x) − f(y)| ≤ L·2^-(n+l+1) < 2^-n.
  return FunName{sample, [l](std::int64_t n) { return n + l + 1; }};
}

/// Local name of e: a Poly or PPoly evaluation with x replaced by the affine map onto D.
inline LocalName eval_local(const Expr& e, LocalName::Kind kind) {
  return LocalName{kind, [e, kind](const DyadicInterval& D, std::int64_t n) {
                     if (kind == LocalName::Kind::LPoly) {
                       Dyadic mid = D.midpoint(), half = D.diameter().shifted(-1);
                       return PPoly::from_cheb(eval_poly(e, n, ChebEnclosure::from_coeffs({mid, half})), D.lo(), D.hi());
                     }
                     return eval_ppoly(e, n, PPoly::identity(D.lo(), D.hi()));
                   }};
}

/// A name of the function in representation s; evaluator-based names ignore n.
using FunctionName = std::variant<FunName, BFun, DBFun, ChebEnclosure, PPoly, Frac, LocalName>;

inline FunctionName eval_function(const Expr& e, Strategy s, std::int64_t n) {
  switch (s) {
    case Strategy::Fun: return eval_fun(e);
    case Strategy::BFun: return eval_bfun(e);
    case Strategy::DBFun: return eval_dbfun(e);
    case Strategy::Poly: return eval_poly(e, n);
    case Strategy::PPoly: return eval_ppoly(e, n);
    case Strategy::Frac: return eval_frac(e, n);
    case Strategy::LPoly: return eval_local(e, LocalName::Kind::LPoly);
    case Strategy::LPPoly: return eval_local(e, LocalName::Kind::LPPoly);
  }
  throw Error(Errc::Unsupported, "unknown strategy");
}

enum class Query { Max, Integrate };

// Names are built slightly beyond the query accuracy; CauchyReal retries with more bits when
// the answer comes out too wide.
inline constexpr std::int64_t kGuardBits = 2;

namespace detail {

// Both evaluator-based algorithms return radius ≤ 2^-(m+1) when called with accuracy m.
template <class F>
Ball fun_answer(const F& f, Query q, std::int64_t n) {
  Ball lo(Dyadic(-1)), hi(Dyadic(1));
  return q == Query::Max ? fun_range_max(f, lo, hi, n) : fun_integrate(f, lo, hi, n - 1);
}

}  // namespace detail

/// max or ∫ over [-1,1] at accuracy n, from a name built at n + kGuardBits.
inline Ball answer(const Expr& e, Strategy s, Query q, std::int64_t n) {
  std::int64_t w = n + kGuardBits;
  Ball lo(Dyadic(-1)), hi(Dyadic(1));
  bool mx = q == Query::Max;
  switch (s) {
    case Strategy::Fun: return detail::fun_answer(fun_from_modulus(eval_fun(e)), q, n);
    case Strategy::BFun: return detail::fun_answer(eval_bfun(e), q, n);
    case Strategy::DBFun: return detail::fun_answer(eval_dbfun(e), q, n);
    case Strategy::Poly: {
      ChebEnclosure p = eval_poly(e, w);
      return mx ? cheb_range_max(p, lo, hi, w) : cheb_integrate(p, lo, hi, w);
    }
    case Strategy::PPoly: {
      PPoly p = eval_ppoly(e, w);
      return mx ? pp_range_max(p, lo, hi, w) : pp_integrate(p, lo, hi, w);
    }
    case Strategy::Frac: {
      Frac f = eval_frac(e, w);
      return mx ? frac_range_max(f, lo, hi, w) : frac_integrate(f, lo, hi, w);
    }
    case Strategy::LPoly:
    case Strategy::LPPoly: {
      LocalName f = eval_local(e, s == Strategy::LPoly ? LocalName::Kind::LPoly : LocalName::Kind::LPPoly);
      return mx ? local_range_max(f, w) : local_integrate(f, w);
    }
  }
  throw Error(Errc::Unsupported, "unknown strategy");
}

/// max_{[-1,1]} e as a real number; each query rebuilds the name at the needed accuracy.
inline CauchyReal eval_max(const Expr& e, Strategy s) {
  return CauchyReal([e, s](std::int64_t n) { return answer(e, s, Query::Max, n); });
}

/// ∫_{-1}^{1} e as a real number.
inline CauchyReal eval_integral(const Expr& e, Strategy s) {
  return CauchyReal([e, s](std::int64_t n) { return answer(e, s, Query::Integrate, n); });
}

}  // namespace fnreps
