#pragma once

// Rational function enclosures num/den on [-1,1] with den ≥ 1, in the power basis.

#include <sstream>
#include <string>
#include <vector>

#include "fnreps/ppoly_divide.hpp"

namespace fnreps {

using DyPoly = std::vector<Dyadic>;  // a_0 + a_1 x + ...

namespace detail {

inline DyPoly dp_trim(DyPoly p) {
  while (p.size() > 1 && p.back().is_zero()) p.pop_back();
  if (p.empty()) p.push_back(Dyadic());
  return p;
}
inline DyPoly dp_add(const DyPoly& a, const DyPoly& b) {
  DyPoly r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return dp_trim(std::move(r));
}
inline DyPoly dp_neg(DyPoly a) {
  for (auto& c : a) c = -c;
  return a;
}
inline DyPoly dp_mul(const DyPoly& a, const DyPoly& b) {
  note_degree(a.size() + b.size() - 2);
  charge_nodes(a.size() * b.size() / 64 + 1);
  DyPoly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a[i].is_zero())
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return dp_trim(std::move(r));
}
inline DyPoly dp_scale(DyPoly a, const Dyadic& s) {
  for (auto& c : a) c = c * s;
  return dp_trim(std::move(a));
}
inline DyPoly dp_derivative(const DyPoly& a) {
  DyPoly r;
  for (std::size_t i = 1; i < a.size(); ++i) r.push_back(a[i] * Dyadic(static_cast<long>(i)));
  return dp_trim(std::move(r));
}
// Σ|a_i| ≥ sup over [-1,1].
inline Dyadic dp_l1(const DyPoly& a) {
  Dyadic s;
  for (const auto& c : a) s = (s + c.abs()).round_up_magnitude();
  return s;
}
inline Ball dp_eval(const DyPoly& a, const Ball& x) {
  Ball acc;
  if (x.is_exact()) {
    Dyadic v;
    for (auto it = a.rbegin(); it != a.rend(); ++it) v = v * x.center() + *it;
    return Ball(v);
  }
  for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * x + Ball(*it);
  return acc;
}
inline bool dp_at_least(const DyPoly& a, const Dyadic& c) {
  DyPoly s = a;
  s[0] -= c;
  return certify_nonnegative(PowerPolyInt::from_dyadics(s).coeffs, DyadicInterval::unit());
}

}  // namespace detail

/// num/den ± err with den ≥ 1 certified on [-1,1].
class Frac {
 public:
  /// Rescales num and den by a power of two when den is positive but dips below 1.
  Frac(DyPoly num, DyPoly den, Dyadic err = {})
      : num_(detail::dp_trim(std::move(num))), den_(detail::dp_trim(std::move(den))), err_(std::move(err)) {
    normalize();
  }
  static Frac polynomial(DyPoly p, Dyadic err = {}) { return Frac(std::move(p), {Dyadic(1)}, std::move(err)); }

  const DyPoly& num() const { return num_; }
  const DyPoly& den() const { return den_; }
  const Dyadic& err() const { return err_; }
  /// Bound on sup |num/den|.
  Dyadic sup_bound() const { return detail::dp_l1(num_); }

  Frac widened(const Dyadic& e) const {
    Frac r = *this;
    r.err_ = (r.err_ + e).round_up_magnitude();
    return r;
  }

 private:
  struct Trusted {};
  Frac(Trusted, DyPoly num, DyPoly den, Dyadic err)
      : num_(detail::dp_trim(std::move(num))), den_(detail::dp_trim(std::move(den))), err_(std::move(err)) {}
  friend Frac frac_add(const Frac&, const Frac&);
  friend Frac frac_mul(const Frac&, const Frac&);
  friend Frac frac_neg(const Frac&);
  friend Frac frac_div(const Frac&, const Frac&);

  void normalize() {
    if (detail::dp_at_least(den_, Dyadic(1))) return;
    // A positive lower bound from the range of -den, then a power of two above its inverse.
    ChebEnclosure c = from_power_basis(den_);
    Ball m = cheb_range_max(-c, Ball(Dyadic(-1)), Ball(Dyadic(1)), 64);
    if (m.hi().sign() >= 0) throw Error(Errc::NotBoundedBelow, "denominator is not certified positive");
    Dyadic lb = -m.hi();
    for (std::int64_t k = std::max<std::int64_t>(0, -lb.floor_log2());; ++k) {
      if (detail::dp_at_least(detail::dp_scale(den_, Dyadic::pow2(k)), Dyadic(1))) {
        num_ = detail::dp_scale(num_, Dyadic::pow2(k));
        den_ = detail::dp_scale(den_, Dyadic::pow2(k));
        return;
      }
      if (k > 4096) throw Error(Errc::NotBoundedBelow, "denominator lower bound is too small");
    }
  }

  DyPoly num_, den_;
  Dyadic err_;
};

inline Frac frac_add(const Frac& f, const Frac& g) {
  using namespace detail;
  return Frac(Frac::Trusted{}, dp_add(dp_mul(f.num_, g.den_), dp_mul(g.num_, f.den_)), dp_mul(f.den_, g.den_),
              (f.err_ + g.err_).round_up_magnitude());
}

inline Frac frac_neg(const Frac& f) { return Frac(Frac::Trusted{}, detail::dp_neg(f.num_), f.den_, f.err_); }

inline Frac frac_sub(const Frac& f, const Frac& g) { return frac_add(f, frac_neg(g)); }

inline Frac frac_mul(const Frac& f, const Frac& g) {
  using namespace detail;
  // |fg − FG| ≤ (|F| + e_f)·e_g + |G|·e_f.
  Dyadic e = (f.sup_bound() + f.err_) * g.err_ + g.sup_bound() * f.err_;
  return Frac(Frac::Trusted{}, dp_mul(f.num_, g.num_), dp_mul(f.den_, g.den_), e.round_up_magnitude());
}

/// f / g where the numerator of g is certified ≥ 1.
inline Frac frac_div(const Frac& f, const Frac& g) {
  using namespace detail;
  if (!dp_at_least(g.num_, Dyadic(1))) throw Error(Errc::NotBoundedBelow, "divisor numerator is not certified ≥ 1");
  Dyadic e;
  if (!f.err_.is_zero() || !g.err_.is_zero()) {
    // G = num/den ≥ 1/‖den‖₁ =: lb and |g| ≥ lb − e_g.
    Dyadic lb = div_floor(Dyadic(1), dp_l1(g.den_), 64);
    Dyadic glb = lb - g.err_;
    if (glb.sign() <= 0) throw Error(Errc::NotBoundedBelow, "divisor error swamps its lower bound");
    e = div_up(f.err_, glb) + div_up(f.sup_bound() * g.err_, glb * lb);
  }
  return Frac(Frac::Trusted{}, dp_mul(f.num_, g.den_), dp_mul(f.den_, g.num_), e.round_up_magnitude());
}

/// Encloses f(ξ) for ξ ∈ x ⊆ [-1,1].
inline Ball frac_eval(const Frac& f, const Ball& x, std::int64_t bits = 64) {
  if (x.lo() < Dyadic(-1) || x.hi() > Dyadic(1)) throw Error(Errc::DomainViolation, "evaluation point outside [-1,1]");
  Ball n = detail::dp_eval(f.num(), x), d = detail::dp_eval(f.den(), x);
  // d ≥ 1 on the domain, so the ball can be clipped from below.
  d = Ball::from_interval(max(d.lo(), Dyadic(1)), max(d.hi(), Dyadic(1)));
  return divide(n, d, bits).widened(f.err());
}

/// Σ|a_i| of P'Q − PQ', a Lipschitz constant of P/Q when Q ≥ 1.
inline Dyadic frac_lipschitz(const Frac& f) {
  using namespace detail;
  DyPoly a = dp_add(dp_mul(dp_derivative(f.num()), f.den()), dp_neg(dp_mul(f.num(), dp_derivative(f.den()))));
  return dp_l1(a);
}

/// Piecewise polynomial within 2^-n of num/den (plus err), via bounded division of den.
inline PPoly frac_to_ppoly(const Frac& f, std::int64_t n) {
  Dyadic nb = f.sup_bound();
  std::int64_t extra = nb.is_zero() ? 0 : std::max<std::int64_t>(0, nb.ceil_log2());
  ChebEnclosure num = from_power_basis(f.num());
  PPoly q = pp_divide(PPoly::from_cheb(from_power_basis(f.den())), n + 2 + extra);
  return pp_mul(PPoly::from_cheb(num), q, n + 1).widened(f.err());
}

namespace detail {

// Candidates for the max of num/den over [lo, hi]: the endpoints and isolating intervals of
// the critical points. Returns the max over candidates of the lower and upper value bounds.
inline std::pair<Dyadic, Dyadic> frac_max_candidates(const Frac& f, const Dyadic& lo, const Dyadic& hi,
                                                     std::int64_t n) {
  DyPoly a = dp_add(dp_mul(dp_derivative(f.num()), f.den()), dp_neg(dp_mul(f.num(), dp_derivative(f.den()))));
  // Interval Horner over a width-δ interval widens num and den by their derivative norms times δ.
  Dyadic spread = dp_l1(dp_derivative(f.num())) + dp_l1(f.num()) * dp_l1(dp_derivative(f.den())) + Dyadic(1);
  std::int64_t bits = n + 4 + spread.ceil_log2();
  std::vector<Ball> vals{frac_eval(f, Ball(lo), n + 3), frac_eval(f, Ball(hi), n + 3)};
  PowerPolyInt pa = PowerPolyInt::from_dyadics(a);
  if (pa.degree() >= 1 && lo < hi)
    for (const auto& iv : isolate_roots(pa.coeffs, DyadicInterval(lo, hi), bits))
      vals.push_back(frac_eval(f, Ball::from_interval(iv.lo(), iv.hi()), n + 3));
  Dyadic best_lo = vals[0].lo(), best_hi = vals[0].hi();
  for (const auto& v : vals) {
    best_lo = max(best_lo, v.lo());
    best_hi = max(best_hi, v.hi());
  }
  return {best_lo, best_hi};
}

}  // namespace detail

/// Encloses max over [α, β] of f for all α ∈ a, β ∈ b, within about 2^-n plus err.
inline Ball frac_range_max(const Frac& f, const Ball& a, const Ball& b, std::int64_t n) {
  if (a.lo() < Dyadic(-1) || b.hi() > Dyadic(1) || b.hi() < a.lo())
    throw Error(Errc::DomainViolation, "range outside [-1,1]");
  // frac_eval already includes err in each candidate.
  Dyadic upper = detail::frac_max_candidates(f, a.lo(), b.hi(), n).second;
  Dyadic lower = a.hi() <= b.lo() ? detail::frac_max_candidates(f, a.hi(), b.lo(), n).first
                                  : frac_eval(f, a, n + 3).lo();
  return Ball::from_interval(min(lower, upper), upper);
}

/// ∫_a^b f through the piecewise polynomial conversion.
inline Ball frac_integrate(const Frac& f, const Ball& a, const Ball& b, std::int64_t n) {
  return pp_integrate(frac_to_ppoly(f, n + 2), a, b, n + 2);
}

inline std::string dump(const Frac& f) {
  std::ostringstream os;
  auto poly = [&os](const DyPoly& p) {
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? " " : "") << p[i].str();
  };
  os << "num: ";
  poly(f.num());
  os << " / den: ";
  poly(f.den());
  os << " err: " << f.err().str() << '\n';
  return os.str();
}

}  // namespace fnreps
