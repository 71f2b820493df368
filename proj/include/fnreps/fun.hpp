#pragma once

// Evaluator-based function names: interval extensions (BFun), extensions paired with a
// derivative extension (DBFun), and point samplers with a modulus of continuity (Fun).

#include <functional>
#include <optional>
#include <queue>
#include <vector>

#include "fnreps/budget.hpp"
#include "fnreps/elementary.hpp"
#include "fnreps/real.hpp"

namespace fnreps {

/// An interval extension of f on [-1,1]. `prec` controls the rounding of intermediate
/// results, which each contribute about 2^-prec to the radius.
class BFun {
 public:
  using Extension = std::function<Ball(const Ball&, std::int64_t)>;

  explicit BFun(Extension e) : ext_(std::move(e)) {}

  Ball operator()(const Ball& x, std::int64_t prec) const { return ext_(x, prec); }

 private:
  Extension ext_;
};

inline BFun bfun_const(const Dyadic& c) {
  return BFun([c](const Ball&, std::int64_t) { return Ball(c); });
}
inline BFun bfun_const(const CauchyReal& c) {
  return BFun([c](const Ball&, std::int64_t p) { return c.query(p); });
}
inline BFun bfun_x() {
  return BFun([](const Ball& x, std::int64_t) { return x; });
}

inline BFun operator+(const BFun& f, const BFun& g) {
  return BFun([f, g](const Ball& x, std::int64_t p) { return (f(x, p) + g(x, p)).rounded(p); });
}
inline BFun operator-(const BFun& f, const BFun& g) {
  return BFun([f, g](const Ball& x, std::int64_t p) { return (f(x, p) - g(x, p)).rounded(p); });
}
inline BFun operator-(const BFun& f) {
  return BFun([f](const Ball& x, std::int64_t p) { return -f(x, p); });
}
inline BFun operator*(const BFun& f, const BFun& g) {
  return BFun([f, g](const Ball& x, std::int64_t p) { return (f(x, p) * g(x, p)).rounded(p); });
}
/// Ball division; raises DivisionByZeroPossible where the divisor's enclosure meets 0.
inline BFun operator/(const BFun& f, const BFun& g) {
  return BFun([f, g](const Ball& x, std::int64_t p) { return divide(f(x, p), g(x, p), p); });
}
inline BFun sin(const BFun& f) {
  return BFun([f](const Ball& x, std::int64_t p) { return sin(f(x, p), p); });
}
inline BFun cos(const BFun& f) {
  return BFun([f](const Ball& x, std::int64_t p) { return cos(f(x, p), p); });
}
inline BFun max(const BFun& f, const BFun& g) {
  return BFun([f, g](const Ball& x, std::int64_t p) { return ball_max(f(x, p), g(x, p)); });
}

inline void require_unit_ball(const Ball& x) {
  if (x.lo() < Dyadic(-1) || x.hi() > Dyadic(1)) throw Error(Errc::DomainViolation, "argument outside [-1,1]");
}

inline Ball bfun_eval(const BFun& f, const Ball& x, std::int64_t prec = 64) {
  require_unit_ball(x);
  return f(x, prec);
}

/// A BFun together with an extension of its derivative.
struct DBFun {
  BFun value;
  BFun derivative;
};

inline DBFun dbfun_const(const Dyadic& c) { return {bfun_const(c), bfun_const(Dyadic())}; }
inline DBFun dbfun_const(const CauchyReal& c) { return {bfun_const(c), bfun_const(Dyadic())}; }
inline DBFun dbfun_x() { return {bfun_x(), bfun_const(Dyadic(1))}; }

inline DBFun operator+(const DBFun& f, const DBFun& g) { return {f.value + g.value, f.derivative + g.derivative}; }
inline DBFun operator-(const DBFun& f, const DBFun& g) { return {f.value - g.value, f.derivative - g.derivative}; }
inline DBFun operator-(const DBFun& f) { return {-f.value, -f.derivative}; }
inline DBFun operator*(const DBFun& f, const DBFun& g) {
  return {f.value * g.value, f.derivative * g.value + f.value * g.derivative};
}
inline DBFun operator/(const DBFun& f, const DBFun& g) {
  return {f.value / g.value, (f.derivative * g.value - f.value * g.derivative) / (g.value * g.value)};
}
inline DBFun sin(const DBFun& f) { return {sin(f.value), cos(f.value) * f.derivative}; }
inline DBFun cos(const DBFun& f) { return {cos(f.value), -(sin(f.value) * f.derivative)}; }
/// Where the branches cross, max is only Lipschitz; the hull of both derivative
/// extensions still contains every difference quotient.
inline DBFun max(const DBFun& f, const DBFun& g) {
  BFun fd = f.derivative, gd = g.derivative;
  BFun hull([fd, gd](const Ball& x, std::int64_t p) { return fd(x, p).hull(gd(x, p)); });
  return {max(f.value, g.value), hull};
}

/// Plain extension intersected with the mean-value form f(c) + [-r, r]·f'(x).
inline Ball dbfun_eval(const DBFun& f, const Ball& x, std::int64_t prec = 64) {
  require_unit_ball(x);
  Ball plain = f.value(x, prec);
  if (x.is_exact()) return plain;
  Ball mv = (f.value(Ball(x.center()), prec) + Ball(Dyadic(), x.radius()) * f.derivative(x, prec)).rounded(prec);
  return plain.intersect(mv);
}

/// The mean-value extension of f as a BFun.
inline BFun as_bfun(const DBFun& f) {
  return BFun([f](const Ball& x, std::int64_t p) { return dbfun_eval(f, x, p); });
}

/// A point sampler with a modulus: |x − y| < 2^-modulus(n) implies |f(x) − f(y)| < 2^-n.
struct FunName {
  std::function<Ball(const Dyadic&, std::int64_t)> sample;  // radius ≤ 2^-n
  std::function<std::int64_t(std::int64_t)> modulus;
};

/// Interval extension from a sample at the midpoint, inflated by what the modulus allows.
inline BFun fun_from_modulus(const FunName& f) {
  return BFun([f](const Ball& x, std::int64_t prec) {
    const Dyadic& r = x.radius();
    if (r.is_zero()) return f.sample(x.center(), prec);
    for (std::int64_t k = prec; k >= 0; --k)
      if (r < Dyadic::pow2(-f.modulus(k))) return f.sample(x.center(), k).widened(Dyadic::pow2(-k));
    // Chain the modulus at accuracy 0 across the radius: each hop shorter than 2^-m moves f by < 1.
    std::int64_t m = f.modulus(0);
    Dyadic hops = r.shifted(m).round_down(0) + Dyadic(1);
    return f.sample(x.center(), 0).widened(hops + Dyadic(1));
  });
}

namespace detail {

// Ball arithmetic may fail to separate a divisor from 0 on a wide box; such boxes have no
// enclosure yet and are bisected further.
inline std::optional<Ball> try_eval(const BFun& f, const Ball& x, std::int64_t prec) {
  try {
    return f(x, prec);
  } catch (const Error& e) {
    if (e.code() != Errc::DivisionByZeroPossible) throw;
    return std::nullopt;
  }
}

struct MaxBox {
  Dyadic lo, hi;
  std::optional<Dyadic> upper;  // empty means unbounded
};
// Larger upper bound first; ties go to the lower endpoint.
struct MaxBoxOrder {
  bool operator()(const MaxBox& a, const MaxBox& b) const {
    if (a.upper != b.upper) return a.upper && (!b.upper || *a.upper < *b.upper);
    return b.lo < a.lo;
  }
};

}  // namespace detail

/// Branch and bound for max over [α, β] with α ∈ a, β ∈ b. Every box evaluation is charged
/// to the active node budget.
inline Ball fun_range_max(const BFun& f, const Ball& a, const Ball& b, std::int64_t n) {
  if (a.lo() < Dyadic(-1) || b.hi() > Dyadic(1) || b.hi() < a.lo())
    throw Error(Errc::DomainViolation, "range outside [-1,1]");
  std::int64_t prec = n + 6;
  Dyadic olo = a.lo(), ohi = b.hi();
  bool has_inner = a.hi() <= b.lo();
  Dyadic ilo = a.hi(), ihi = b.lo();

  Dyadic best = has_inner ? max(f(Ball(ilo), prec).lo(), f(Ball(ihi), prec).lo()) : f(a, prec).lo();
  charge_nodes(2);
  auto probe = [&](const Dyadic& x) {
    if (has_inner && ilo <= x && x <= ihi) {
      charge_nodes();
      best = max(best, f(Ball(x), prec).lo());
    }
  };

  std::priority_queue<detail::MaxBox, std::vector<detail::MaxBox>, detail::MaxBoxOrder> queue;
  auto push = [&](const Dyadic& lo, const Dyadic& hi) {
    charge_nodes();
    auto v = detail::try_eval(f, Ball::from_interval(lo, hi), prec);
    if (!v) {
      queue.push({lo, hi, std::nullopt});
    } else if (v->hi() >= best) {
      queue.push({lo, hi, v->hi()});
    }
  };
  push(olo, ohi);
  Dyadic tol = Dyadic::pow2(-n);
  while (true) {
    if (queue.empty()) throw Error(Errc::EmptyRange, "every box was pruned");
    detail::MaxBox top = queue.top();
    if (top.upper && *top.upper - best <= tol) return Ball::from_interval(min(best, *top.upper), *top.upper);
    queue.pop();
    if (top.hi - top.lo < Dyadic::pow2(-n - 80))
      throw Error(Errc::Timeout, "branch and bound stalled at the working precision");
    Dyadic mid = (top.lo + top.hi).shifted(-1);
    probe(mid);
    push(top.lo, mid);
    push(mid, top.hi);
  }
}

inline Ball fun_range_max(const DBFun& f, const Ball& a, const Ball& b, std::int64_t n) {
  return fun_range_max(as_bfun(f), a, b, n);
}

/// ∫_a^b f by recursive bisection. A box of width w whose enclosure has radius ρ is accepted
/// once w·ρ ≤ 2^-(n+2+depth). The leaves' 2^-depth sum to 1, so accepted areas add up to at
/// most 2^-(n+2) and the result has radius ≤ 2^-(n+1) plus the endpoint term.
inline Ball fun_integrate(const BFun& f, const Ball& a, const Ball& b, std::int64_t n) {
  if (a.lo() < Dyadic(-1) || b.hi() > Dyadic(1)) throw Error(Errc::DomainViolation, "range outside [-1,1]");
  Dyadic lo = a.center(), hi = b.center();
  int sign = 1;
  if (hi < lo) {
    std::swap(lo, hi);
    sign = -1;
  }
  Dyadic center, radius;
  // Uncertain endpoints cost sup|f| times their radii.
  if (!a.is_exact() || !b.is_exact()) {
    Dyadic lo_all = min(a.lo(), b.lo()), hi_all = max(a.hi(), b.hi());
    Dyadic m = f(Ball::from_interval(lo_all, hi_all), n + 6).mag();
    radius = (m * (a.radius() + b.radius())).round_up_magnitude();
  }
  struct Node {
    Dyadic lo, hi;
    std::int64_t depth;
  };
  std::vector<Node> stack;
  if (lo < hi) stack.push_back({lo, hi, 0});
  while (!stack.empty()) {
    Node node = stack.back();
    stack.pop_back();
    charge_nodes();
    Dyadic w = node.hi - node.lo;
    std::int64_t tol_exp = -(n + 2) - node.depth;
    auto v = detail::try_eval(f, Ball::from_interval(node.lo, node.hi), n + 8 + node.depth);
    Dyadic area = v ? (w * v->radius()).round_up_magnitude() : Dyadic();
    if (v && area <= Dyadic::pow2(tol_exp)) {
      center += v->center() * w;
      radius = (radius + area).round_up_magnitude();
      continue;
    }
    if (node.depth > n + 80) throw Error(Errc::Timeout, "integration did not converge");
    Dyadic mid = (node.lo + node.hi).shifted(-1);
    stack.push_back({mid, node.hi, node.depth + 1});
    stack.push_back({node.lo, mid, node.depth + 1});
  }
  Ball r = Ball(center, radius).rounded(n + 2);
  return sign > 0 ? r : -r;
}

inline Ball fun_integrate(const DBFun& f, const Ball& a, const Ball& b, std::int64_t n) {
  return fun_integrate(as_bfun(f), a, b, n);
}

}  // namespace fnreps
