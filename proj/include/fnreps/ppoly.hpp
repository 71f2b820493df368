#pragma once

// Piecewise polynomial enclosures with dyadic breakpoints.
//
// Each piece maps its interval [a,b] onto u ∈ [-1,1] via x = mid + half·u and stores a
// ChebEnclosure in u. The piece error is the enclosure's err and holds on [a,b] only.

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fnreps/chebpoly.hpp"

namespace fnreps {

struct Piece {
  Dyadic a, b;
  ChebEnclosure p;

  Dyadic mid() const { return (a + b).shifted(-1); }
  Dyadic half() const { return (b - a).shifted(-1); }
  Dyadic x_at(const Dyadic& u) const { return mid() + half() * u; }
  const Dyadic& err() const { return p.err; }
};

namespace detail {

// a/b rounded up to about 64 significant bits; a ≥ 0, b > 0.
inline Dyadic div_up(const Dyadic& a, const Dyadic& b) {
  if (a.is_zero()) return {};
  return div_ceil(a, b, 64 - (a.floor_log2() - b.floor_log2())).round_up_magnitude();
}

inline bool is_pow2(const Dyadic& d) { return d.sign() > 0 && d.mantissa() == 1; }

// Enclosure of the local coordinate of x in the piece, clamped to [-1,1].
inline Ball local_u(const Piece& pc, const Dyadic& x, std::int64_t bits) {
  Dyadic h = pc.half(), dx = x - pc.mid();
  Ball u;
  if (is_pow2(h))
    u = Ball(dx.shifted(-h.exponent()));
  else
    u = Ball::from_interval(div_floor(dx, h, bits), div_ceil(dx, h, bits));
  Dyadic lo = max(u.lo(), Dyadic(-1)), hi = min(u.hi(), Dyadic(1));
  if (hi < lo) return Ball(u.hi() < Dyadic(-1) ? Dyadic(-1) : Dyadic(1));
  return Ball::from_interval(lo, hi);
}

}  // namespace detail

/// The sub-piece on local coordinates [u0, u1]; exact.
inline Piece restrict_u(const Piece& pc, const Dyadic& u0, const Dyadic& u1) {
  if (u0 == Dyadic(-1) && u1 == Dyadic(1)) return pc;
  Piece r{pc.x_at(u0), pc.x_at(u1), cheb_affine(pc.p.center(), (u1 - u0).shifted(-1), (u1 + u0).shifted(-1))};
  r.p.err = pc.p.err;
  return r;
}

/// The sub-piece on [x0, x1] ⊆ [a, b]. Local endpoints that are not dyadic are rounded
/// inward and the Lipschitz cost of the rounding joins the piece error.
inline Piece restrict_x(const Piece& pc, const Dyadic& x0, const Dyadic& x1, std::int64_t bits) {
  if (x0 == pc.a && x1 == pc.b) return pc;
  Dyadic h = pc.half();
  Dyadic lip = lipschitz_bound(pc.p.center());
  Dyadic width = detail::div_up(x1 - x0, h);
  std::int64_t w = bits + 4 + (lip.is_zero() ? 0 : std::max<std::int64_t>(0, lip.ceil_log2()));
  if (!width.is_zero()) w = std::max<std::int64_t>(w, 8 - width.floor_log2());
  Ball b0 = detail::local_u(pc, x0, w), b1 = detail::local_u(pc, x1, w);
  Piece r;
  if (b0.is_exact() && b1.is_exact()) {
    r = restrict_u(pc, b0.center(), b1.center());
  } else {
    Dyadic u0 = b0.hi(), u1 = max(b1.lo(), u0);
    r = restrict_u(pc, u0, u1);
    r.p.err = (pc.p.err + lip * Dyadic::pow2(-w)).round_up_magnitude();
  }
  r.a = x0;
  r.b = x1;
  return r;
}

class PPoly {
 public:
  std::vector<Piece> pieces;

  PPoly() = default;
  explicit PPoly(std::vector<Piece> ps) : pieces(std::move(ps)) { validate(); }

  static PPoly from_cheb(const ChebEnclosure& p, const Dyadic& lo = Dyadic(-1), const Dyadic& hi = Dyadic(1)) {
    return PPoly({Piece{lo, hi, p}});
  }
  static PPoly constant(const Dyadic& c, const Dyadic& lo = Dyadic(-1), const Dyadic& hi = Dyadic(1)) {
    return from_cheb(ChebEnclosure(c), lo, hi);
  }
  /// x ↦ x on [lo, hi].
  static PPoly identity(const Dyadic& lo = Dyadic(-1), const Dyadic& hi = Dyadic(1)) {
    Piece pc{lo, hi, {}};
    pc.p = ChebEnclosure::from_coeffs({pc.mid(), pc.half()});
    return PPoly({pc});
  }
  /// The piecewise linear function through (x_i, y_i), x strictly increasing.
  static PPoly linear(const std::vector<std::pair<Dyadic, Dyadic>>& nodes) {
    std::vector<Piece> ps;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const auto& [x0, y0] = nodes[i];
      const auto& [x1, y1] = nodes[i + 1];
      ps.push_back(Piece{x0, x1, ChebEnclosure::from_coeffs({(y0 + y1).shifted(-1), (y1 - y0).shifted(-1)})});
    }
    return PPoly(std::move(ps));
  }

  const Dyadic& lo() const { return pieces.front().a; }
  const Dyadic& hi() const { return pieces.back().b; }
  std::size_t size() const { return pieces.size(); }

  std::vector<Dyadic> breakpoints() const {
    std::vector<Dyadic> r;
    for (const auto& pc : pieces) r.push_back(pc.a);
    r.push_back(hi());
    return r;
  }

  /// Largest piece error.
  Dyadic error_radius() const {
    Dyadic e;
    for (const auto& pc : pieces) e = max(e, pc.err());
    return e;
  }
  int max_degree() const {
    int d = 0;
    for (const auto& pc : pieces) d = std::max(d, pc.p.degree());
    return d;
  }

  PPoly center() const {
    PPoly r = *this;
    for (auto& pc : r.pieces) pc.p.err = Dyadic();
    return r;
  }
  /// Adds e to every piece error.
  PPoly widened(const Dyadic& e) const {
    PPoly r = *this;
    for (auto& pc : r.pieces) pc.p.err = (pc.p.err + e).round_up_magnitude();
    return r;
  }

  /// Index of the piece containing x (the left one at a breakpoint).
  std::size_t locate(const Dyadic& x) const {
    std::size_t lo = 0, hi = pieces.size() - 1;
    while (lo < hi) {
      std::size_t m = (lo + hi) / 2;
      if (x <= pieces[m].b)
        hi = m;
      else
        lo = m + 1;
    }
    return lo;
  }

 private:
  void validate() const {
    if (pieces.empty()) throw Error(Errc::DomainViolation, "piecewise polynomial without pieces");
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (!(pieces[i].a < pieces[i].b)) throw Error(Errc::DomainViolation, "empty or reversed piece");
      if (i > 0 && pieces[i - 1].b != pieces[i].a) throw Error(Errc::DomainViolation, "pieces do not tile");
    }
  }
};

/// Pairs of pieces of f and g on the union of their breakpoints.
inline std::vector<std::pair<Piece, Piece>> refine(const PPoly& f, const PPoly& g, std::int64_t bits) {
  if (f.lo() != g.lo() || f.hi() != g.hi()) throw Error(Errc::DomainViolation, "operands live on different domains");
  std::vector<std::pair<Piece, Piece>> out;
  std::size_t i = 0, j = 0;
  Dyadic x = f.lo();
  while (i < f.size() && j < g.size()) {
    Dyadic next = min(f.pieces[i].b, g.pieces[j].b);
    out.emplace_back(restrict_x(f.pieces[i], x, next, bits), restrict_x(g.pieces[j], x, next, bits));
    if (f.pieces[i].b == next) ++i;
    if (g.pieces[j].b == next) ++j;
    x = next;
  }
  return out;
}

namespace detail {

inline PPoly zip(const PPoly& f, const PPoly& g, std::int64_t bits,
                 const std::function<ChebEnclosure(const ChebEnclosure&, const ChebEnclosure&)>& op) {
  std::vector<Piece> ps;
  for (auto& [a, b] : refine(f, g, bits)) ps.push_back(Piece{a.a, a.b, op(a.p, b.p)});
  return PPoly(std::move(ps));
}

inline PPoly map(const PPoly& f, const std::function<ChebEnclosure(const ChebEnclosure&)>& op) {
  PPoly r = f;
  for (auto& pc : r.pieces) pc.p = op(pc.p);
  return r;
}

}  // namespace detail

/// f + g; exact on a shared partition, otherwise accurate to about 2^-n.
inline PPoly pp_add(const PPoly& f, const PPoly& g, std::int64_t n = 64) {
  return detail::zip(f, g, n, [](const auto& a, const auto& b) { return a + b; });
}
inline PPoly pp_sub(const PPoly& f, const PPoly& g, std::int64_t n = 64) {
  return detail::zip(f, g, n, [](const auto& a, const auto& b) { return a - b; });
}
inline PPoly pp_neg(const PPoly& f) {
  return detail::map(f, [](const auto& a) { return -a; });
}
inline PPoly pp_scale(const PPoly& f, const Dyadic& s) {
  return detail::map(f, [&](const auto& a) { return cheb_scale(a, s); });
}
inline PPoly pp_scale(const PPoly& f, const Ball& s) {
  return detail::map(f, [&](const auto& a) { return cheb_scale(a, s); });
}
/// f + c for a constant ball c.
inline PPoly pp_add_const(const PPoly& f, const Ball& c) {
  return detail::map(f, [&](const auto& a) {
    ChebEnclosure k(c.center());
    k.err = c.radius();
    return a + k;
  });
}
/// f·g size-reduced to 2^-(n+2) per product.
inline PPoly pp_mul(const PPoly& f, const PPoly& g, std::int64_t n) {
  return detail::zip(f, g, n + 4, [n](const auto& a, const auto& b) { return size_reduce(a * b, n + 2); });
}
/// Size reduction of every piece.
inline PPoly pp_size_reduce(const PPoly& f, std::int64_t n) {
  return detail::map(f, [n](const auto& a) { return size_reduce(a, n); });
}

/// Encloses f(x) for a dyadic x in the domain.
inline Ball pp_eval(const PPoly& f, const Dyadic& x, std::int64_t bits = 64) {
  if (x < f.lo() || x > f.hi()) throw Error(Errc::DomainViolation, "evaluation point outside the domain");
  const Piece& pc = f.pieces[f.locate(x)];
  Dyadic lip = lipschitz_bound(pc.p.center());
  std::int64_t w = bits + 4 + (lip.is_zero() ? 0 : std::max<std::int64_t>(0, lip.ceil_log2()));
  return cheb_eval(pc.p, detail::local_u(pc, x, w), bits);
}

/// Encloses f(ξ) for every ξ in x ∩ domain.
inline Ball pp_eval(const PPoly& f, const Ball& x, std::int64_t bits = 64) {
  if (x.is_exact()) return pp_eval(f, x.center(), bits);
  Dyadic lo = max(x.lo(), f.lo()), hi = min(x.hi(), f.hi());
  if (hi < lo) throw Error(Errc::DomainViolation, "evaluation ball outside the domain");
  std::optional<Ball> acc;
  for (std::size_t i = f.locate(lo); i < f.size() && f.pieces[i].a <= hi; ++i) {
    const Piece& pc = f.pieces[i];
    Ball u0 = detail::local_u(pc, max(lo, pc.a), bits + 8), u1 = detail::local_u(pc, min(hi, pc.b), bits + 8);
    Ball v = cheb_eval(pc.p, Ball::from_interval(u0.lo(), u1.hi()), bits);
    acc = acc ? acc->hull(v) : v;
  }
  return *acc;
}

namespace detail {

// Σ|a_i| of the derivative in the power basis, or the Chebyshev ℓ¹ norm of the derivative
// when that is smaller. Both bound |p'| on [-1,1].
inline Dyadic local_lipschitz(const ChebEnclosure& p) {
  ChebEnclosure d = cheb_derivative(p.center());
  if (d.coeffs.empty()) return {};
  Dyadic cheb = l1_norm(d);
  if (d.degree() > 48) return cheb;
  Dyadic pow;
  for (const auto& c : to_power_basis(d).to_dyadics()) pow = (pow + c.abs()).round_up_magnitude();
  return min(pow, cheb);
}

}  // namespace detail

/// Lipschitz constant of the center function on each piece, in x units; the maximum over pieces.
inline Dyadic pp_lipschitz(const PPoly& f) {
  Dyadic l;
  for (const auto& pc : f.pieces) l = max(l, detail::div_up(detail::local_lipschitz(pc.p), pc.half()));
  return l;
}

/// Largest jump of the center function across a breakpoint.
inline Dyadic pp_max_jump(const PPoly& f) {
  Dyadic j;
  for (std::size_t i = 1; i < f.size(); ++i) {
    Ball l = cheb_eval(f.pieces[i - 1].p.center(), Ball(Dyadic(1)));
    Ball r = cheb_eval(f.pieces[i].p.center(), Ball(Dyadic(-1)));
    j = max(j, (l - r).mag());
  }
  return j;
}

namespace detail {

// Max of the center of one piece over x ∈ [x0, x1] ⊆ [a, b]. Local endpoints are rounded
// outward (upper bound wanted) or inward (lower bound wanted).
inline Ball piece_max(const Piece& pc, const Dyadic& x0, const Dyadic& x1, std::int64_t n, bool outward) {
  ChebEnclosure c = pc.p.center();
  Dyadic lip = lipschitz_bound(c);
  std::int64_t w = n + 6 + (lip.is_zero() ? 0 : std::max<std::int64_t>(0, lip.ceil_log2()));
  Ball u0 = local_u(pc, x0, w), u1 = local_u(pc, x1, w);
  Dyadic lo = outward ? u0.lo() : u0.hi(), hi = outward ? u1.hi() : u1.lo();
  if (hi < lo) return cheb_eval(c, Ball::from_interval(hi, lo), n + 4);
  return cheb_range_max(c, Ball(lo), Ball(hi), n + 1);
}

}  // namespace detail

/// Encloses max over [α, β] of f for all α ∈ a, β ∈ b.
inline Ball pp_range_max(const PPoly& f, const Ball& a, const Ball& b, std::int64_t n) {
  if (a.lo() < f.lo() || b.hi() > f.hi() || b.hi() < a.lo())
    throw Error(Errc::DomainViolation, "range outside the domain");
  Dyadic olo = a.lo(), ohi = b.hi();
  std::optional<Dyadic> upper, lower;
  Dyadic err;
  for (std::size_t i = f.locate(olo); i < f.size() && f.pieces[i].a <= ohi; ++i) {
    const Piece& pc = f.pieces[i];
    Ball m = detail::piece_max(pc, max(olo, pc.a), min(ohi, pc.b), n, true);
    upper = upper ? max(*upper, m.hi() + pc.err()) : m.hi() + pc.err();
    err = max(err, pc.err());
  }
  if (a.hi() <= b.lo()) {
    Dyadic ilo = a.hi(), ihi = b.lo();
    for (std::size_t i = f.locate(ilo); i < f.size() && f.pieces[i].a <= ihi; ++i) {
      const Piece& pc = f.pieces[i];
      Ball m = detail::piece_max(pc, max(ilo, pc.a), min(ihi, pc.b), n, false);
      lower = lower ? max(*lower, m.lo() - pc.err()) : m.lo() - pc.err();
    }
  } else {
    lower = pp_eval(f, a, n + 4).lo();
  }
  return Ball::from_interval(min(*lower, *upper), *upper);
}

namespace detail {

// ∫ from the domain start to x of the center function.
inline Ball primitive_at(const PPoly& f, const Dyadic& x, std::int64_t n) {
  Ball acc(0);
  std::int64_t prec = n + 4 + Dyadic(static_cast<long>(f.size()) + 1).ceil_log2();
  for (const auto& pc : f.pieces) {
    if (pc.a >= x) break;
    ChebEnclosure c = pc.p.center();
    Ball ub = pc.b <= x ? Ball(Dyadic(1)) : local_u(pc, x, prec + 4);
    acc += cheb_integrate(c, Ball(Dyadic(-1)), ub, prec + 2) * Ball(pc.half());
    acc = acc.rounded(prec + 2);
  }
  return acc;
}

}  // namespace detail

/// ∫_a^b f, endpoints as balls in the domain.
inline Ball pp_integrate(const PPoly& f, const Ball& a, const Ball& b, std::int64_t n = 64) {
  for (const Ball* e : {&a, &b})
    if (e->lo() < f.lo() || e->hi() > f.hi()) throw Error(Errc::DomainViolation, "integration bound outside the domain");
  Ball v = detail::primitive_at(f, b.center(), n) - detail::primitive_at(f, a.center(), n);
  // Input error over the covered range plus the endpoint ball widths.
  Dyadic span = (b.center() - a.center()).abs() + a.radius() + b.radius();
  Dyadic sup;
  for (const auto& pc : f.pieces) sup = max(sup, sup_bound(pc.p));
  return v.widened((f.error_radius() * span + sup * (a.radius() + b.radius())).round_up_magnitude());
}

/// t ↦ ∫ from the domain start to t of f, accurate to 2^-n beyond the propagated error.
inline PPoly pp_primit(const PPoly& f, std::int64_t n) {
  std::vector<Piece> ps;
  Ball acc(0);
  Dyadic carried;  // ∫ of the input error so far
  std::int64_t w = n + 4 + Dyadic(static_cast<long>(f.size()) + 1).ceil_log2();
  for (const auto& pc : f.pieces) {
    ChebEnclosure c = pc.p.center();
    std::int64_t wk = w + Dyadic(static_cast<long>(c.degree()) + 2).ceil_log2();
    auto F = detail::antiderivative(c, wk);
    Ball at_start = detail::clenshaw(F, Dyadic(-1), wk);
    ChebEnclosure g;
    Dyadic slack = at_start.radius();
    for (std::size_t k = 0; k < F.size(); ++k) {
      g.set(static_cast<int>(k), F[k].center());
      slack += F[k].radius();
    }
    g.add_to(0, -at_start.center());
    g = cheb_scale(g, pc.half());
    slack = slack * pc.half();
    Ball start = acc.rounded(w);
    g.add_to(0, start.center());
    Dyadic own = pc.err() * (pc.b - pc.a);
    g.err = (slack + start.radius() + carried + own).round_up_magnitude();
    g = size_reduce(g, n + 2);
    ps.push_back(Piece{pc.a, pc.b, g});
    acc += cheb_integrate(c, Ball(Dyadic(-1)), Ball(Dyadic(1)), wk) * Ball(pc.half());
    carried = (carried + own).round_up_magnitude();
  }
  return PPoly(std::move(ps));
}

/// Strong limit: seq(p(n+1)) with its error widened by 2^-(n+1).
inline PPoly pp_lim(const std::function<PPoly(std::int64_t)>& seq, const std::function<std::int64_t(std::int64_t)>& p,
                    std::int64_t n) {
  return seq(p(n + 1)).widened(Dyadic::pow2(-n - 1));
}

/// Σ_{j=k}^{m} seq(j); the empty range gives 0.
inline PPoly pp_sum(std::int64_t k, std::int64_t m, const std::function<PPoly(std::int64_t)>& seq, std::int64_t n,
                    const Dyadic& lo = Dyadic(-1), const Dyadic& hi = Dyadic(1)) {
  PPoly acc = PPoly::constant(Dyadic(), lo, hi);
  for (std::int64_t j = k; j <= m; ++j) acc = pp_size_reduce(pp_add(acc, seq(j), n + 4), n + 2);
  return acc;
}

/// Π_{j=k}^{m} seq(j); the empty range gives 1.
inline PPoly pp_product(std::int64_t k, std::int64_t m, const std::function<PPoly(std::int64_t)>& seq, std::int64_t n,
                        const Dyadic& lo = Dyadic(-1), const Dyadic& hi = Dyadic(1)) {
  PPoly acc = PPoly::constant(Dyadic(1), lo, hi);
  for (std::int64_t j = k; j <= m; ++j) acc = pp_mul(acc, seq(j), n);
  return acc;
}

/// Breakpoint line, then one block of "k:c_k" lines per piece, then "err:r".
inline std::string dump(const PPoly& f) {
  std::ostringstream os;
  os << "breakpoints:";
  for (const auto& x : f.breakpoints()) os << ' ' << x.str();
  os << '\n';
  for (std::size_t i = 0; i < f.size(); ++i) {
    os << "piece " << i << " err:" << f.pieces[i].err().str() << '\n';
    for (const auto& [k, c] : f.pieces[i].p.coeffs) os << k << ':' << c.str() << '\n';
  }
  os << "err:" << f.error_radius().str() << '\n';
  return os.str();
}

}  // namespace fnreps
