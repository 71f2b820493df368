#pragma once

// Certified real root isolation for integer polynomials: square-free reduction, Sturm
// sequences evaluated exactly at dyadic points, and midpoint bisection.

#include <gmpxx.h>

#include <vector>

#include "fnreps/budget.hpp"
#include "fnreps/dyadic.hpp"

namespace fnreps {

/// Dense integer polynomial a_0 + a_1 x + ... (index = degree).
using IntPoly = std::vector<mpz_class>;

/// 2^scale_exponent · Σ a_i x^i with integer a_i.
struct PowerPolyInt {
  IntPoly coeffs;
  std::int64_t scale_exponent = 0;

  int degree() const { return static_cast<int>(coeffs.size()) - 1; }

  /// Exact conversion from dyadic coefficients.
  static PowerPolyInt from_dyadics(const std::vector<Dyadic>& c) {
    PowerPolyInt p;
    bool any = false;
    std::int64_t e = 0;
    for (const auto& d : c)
      if (!d.is_zero()) {
        e = any ? std::min(e, d.exponent()) : d.exponent();
        any = true;
      }
    p.scale_exponent = e;
    p.coeffs.resize(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i].is_zero()) continue;
      mpz_mul_2exp(p.coeffs[i].get_mpz_t(), c[i].mantissa().get_mpz_t(),
                   static_cast<mp_bitcnt_t>(c[i].exponent() - e));
    }
    while (p.coeffs.size() > 1 && p.coeffs.back() == 0) p.coeffs.pop_back();
    if (p.coeffs.empty()) p.coeffs.push_back(0);
    return p;
  }

  std::vector<Dyadic> to_dyadics() const {
    std::vector<Dyadic> out;
    out.reserve(coeffs.size());
    for (const auto& a : coeffs) out.emplace_back(a, scale_exponent);
    return out;
  }

  Dyadic eval(const Dyadic& x) const {
    Dyadic acc;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + Dyadic(*it, 0);
    return acc.shifted(scale_exponent);
  }
};

namespace poly {

inline void trim(IntPoly& p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
  if (p.empty()) p.push_back(0);
}

inline int degree(const IntPoly& p) {
  int d = static_cast<int>(p.size()) - 1;
  while (d > 0 && p[static_cast<std::size_t>(d)] == 0) --d;
  return d;
}

inline bool is_zero(const IntPoly& p) {
  for (const auto& a : p)
    if (a != 0) return false;
  return true;
}

inline IntPoly derivative(const IntPoly& p) {
  if (p.size() <= 1) return {0};
  IntPoly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<unsigned long>(i);
  trim(d);
  return d;
}

inline mpz_class content(const IntPoly& p) {
  mpz_class g = 0;
  for (const auto& a : p) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
  return g;
}

/// Divides by the positive content.
inline IntPoly primitive(IntPoly p) {
  mpz_class g = content(p);
  if (g > 1)
    for (auto& a : p) mpz_divexact(a.get_mpz_t(), a.get_mpz_t(), g.get_mpz_t());
  return p;
}

/// Pseudo-division: lc(b)^steps · a = q·b + r. Returns (q, r, steps).
struct PseudoDivision {
  IntPoly q, r;
  int steps = 0;
};

inline PseudoDivision pseudo_divide(const IntPoly& a, const IntPoly& b) {
  int db = degree(b);
  const mpz_class& lb = b[static_cast<std::size_t>(db)];
  PseudoDivision out;
  out.r = a;
  trim(out.r);
  int da = degree(out.r);
  out.q.assign(static_cast<std::size_t>(std::max(da - db, 0) + 1), 0);
  while (!is_zero(out.r) && degree(out.r) >= db) {
    int dr = degree(out.r);
    mpz_class lr = out.r[static_cast<std::size_t>(dr)];
    for (auto& c : out.r) c *= lb;
    for (auto& c : out.q) c *= lb;
    out.q[static_cast<std::size_t>(dr - db)] += lr;
    for (int i = 0; i <= db; ++i) out.r[static_cast<std::size_t>(i + dr - db)] -= lr * b[static_cast<std::size_t>(i)];
    out.r[static_cast<std::size_t>(dr)] = 0;
    trim(out.r);
    ++out.steps;
    charge_nodes();
  }
  trim(out.q);
  return out;
}

/// Square-free part P / gcd(P, P'), primitive with positive leading coefficient.
inline IntPoly square_free(const IntPoly& p) {
  IntPoly a = primitive(p), b = primitive(derivative(p));
  if (degree(a) < 1) return a;
  // Primitive PRS down to the gcd.
  while (!is_zero(b) && degree(b) > 0) {
    auto pd = pseudo_divide(a, b);
    a = std::move(b);
    b = primitive(std::move(pd.r));
  }
  if (!is_zero(b)) return primitive(p);  // gcd is a constant
  if (degree(a) == 0) return primitive(p);
  auto pd = pseudo_divide(p, a);
  IntPoly q = primitive(std::move(pd.q));
  if (q.back() < 0)
    for (auto& c : q) c = -c;
  return q;
}

/// Sign of p(x) for a dyadic x, computed exactly.
inline int sign_at(const IntPoly& p, const Dyadic& x) {
  std::size_t d = p.size() - 1;
  const mpz_class& m = x.mantissa();
  std::int64_t e = x.exponent();
  mpz_class acc = p[d], t;
  if (e >= 0) {
    mpz_class xv;
    mpz_mul_2exp(xv.get_mpz_t(), m.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
    for (std::size_t i = d; i-- > 0;) acc = acc * xv + p[i];
    return sgn(acc);
  }
  // 2^{k·d} p(m / 2^k) = Σ a_i m^i 2^{k(d-i)}, evaluated by homogeneous Horner.
  auto k = static_cast<mp_bitcnt_t>(-e);
  for (std::size_t i = d; i-- > 0;) {
    acc *= m;
    mpz_mul_2exp(t.get_mpz_t(), p[i].get_mpz_t(), k * (d - i));
    acc += t;
  }
  return sgn(acc);
}

}  // namespace poly

/// Sturm sequence of a square-free integer polynomial.
class SturmSequence {
 public:
  explicit SturmSequence(const IntPoly& p) {
    seq_.push_back(p);
    seq_.push_back(poly::primitive(poly::derivative(p)));
    if (poly::is_zero(seq_.back())) {
      seq_.pop_back();
      return;
    }
    while (poly::degree(seq_.back()) > 0) {
      const IntPoly& a = seq_[seq_.size() - 2];
      const IntPoly& b = seq_.back();
      auto pd = poly::pseudo_divide(a, b);
      if (poly::is_zero(pd.r)) break;
      // -rem(a, b) up to a positive factor.
      bool flip = !(sgn(b[static_cast<std::size_t>(poly::degree(b))]) < 0 && pd.steps % 2 == 1);
      IntPoly r = poly::primitive(std::move(pd.r));
      if (flip)
        for (auto& c : r) c = -c;
      seq_.push_back(std::move(r));
    }
  }

  /// Sign variations at x, zeros dropped.
  int variations(const Dyadic& x) const {
    int v = 0, last = 0;
    for (const auto& s : seq_) {
      int sg = poly::sign_at(s, x);
      if (sg == 0) continue;
      if (last != 0 && sg != last) ++v;
      last = sg;
    }
    return v;
  }

  const IntPoly& base() const { return seq_.front(); }
  std::size_t size() const { return seq_.size(); }

 private:
  std::vector<IntPoly> seq_;
};

/// Isolating intervals of the solutions of P(x) = y: pairwise disjoint (at most sharing an
/// endpoint that is not a solution), sorted, each of diameter ≤ 2^-n and containing a solution.
struct IsolationResult {
  std::vector<DyadicInterval> intervals;
};

namespace detail {

class Isolator {
 public:
  Isolator(const IntPoly& sf, std::int64_t n) : sturm_(sf), p_(sf), n_(n), emit_width_(Dyadic::pow2(-n - 1)) {}

  std::vector<DyadicInterval> run(const Dyadic& lo, const Dyadic& hi) {
    int slo = sgn(lo), shi = sgn(hi);
    if (slo == 0) out_.emplace_back(lo, lo);
    if (lo < hi) solve(lo, hi, slo, shi, count_open(lo, hi, shi));
    if (shi == 0 && lo < hi) out_.emplace_back(hi, hi);
    return merge();
  }

  int count_open(const Dyadic& a, const Dyadic& b, int sb) const {
    return sturm_.variations(a) - sturm_.variations(b) - (sb == 0 ? 1 : 0);
  }

 private:
  int sgn(const Dyadic& x) const { return poly::sign_at(p_, x); }

  void solve(const Dyadic& a, const Dyadic& b, int sa, int sb, int c) {
    if (c <= 0) return;
    charge_nodes();
    if (c == 1 && sa != 0 && sb != 0) {
      refine_simple(a, b, sa);
      return;
    }
    if (b - a <= emit_width_) {
      out_.emplace_back(a, b);
      return;
    }
    Dyadic m = (a + b).shifted(-1);
    int sm = sgn(m);
    int cl = count_open(a, m, sm);
    int cr = c - cl - (sm == 0 ? 1 : 0);
    solve(a, m, sa, sm, cl);
    if (sm == 0) out_.emplace_back(m, m);
    solve(m, b, sm, sb, cr);
  }

  // Exactly one simple root, sign change across [a, b].
  void refine_simple(Dyadic a, Dyadic b, int sa) {
    while (b - a > emit_width_) {
      charge_nodes();
      Dyadic m = (a + b).shifted(-1);
      int sm = sgn(m);
      if (sm == 0) {
        out_.emplace_back(m, m);
        return;
      }
      if (sm == sa)
        a = m;
      else
        b = m;
    }
    out_.emplace_back(a, b);
  }

  std::vector<DyadicInterval> merge() const {
    std::vector<DyadicInterval> res;
    Dyadic limit = Dyadic::pow2(-n_);
    for (const auto& iv : out_) {
      if (!res.empty() && iv.lo() <= res.back().hi() && iv.hi() - res.back().lo() <= limit) {
        res.back() = DyadicInterval(res.back().lo(), max(res.back().hi(), iv.hi()));
        continue;
      }
      res.push_back(iv);
    }
    return res;
  }

  SturmSequence sturm_;
  const IntPoly& p_;
  std::int64_t n_;
  Dyadic emit_width_;
  std::vector<DyadicInterval> out_;
};

}  // namespace detail

/// Isolates the real roots of an integer polynomial inside a closed dyadic interval.
/// The zero polynomial and nonzero constants yield no intervals.
inline std::vector<DyadicInterval> isolate_roots(const IntPoly& p, const DyadicInterval& dom, std::int64_t n) {
  if (poly::degree(p) < 1) return {};
  IntPoly sf = poly::square_free(p);
  detail::Isolator iso(sf, n);
  return iso.run(dom.lo(), dom.hi());
}

/// Solutions of P(x) = y on [-1,1], y = num/den.
inline IsolationResult isolate(const PowerPolyInt& p, const mpq_class& y, std::int64_t n) {
  IntPoly q = p.coeffs;
  poly::trim(q);
  if (poly::degree(q) < 1) throw Error(Errc::ConstantPolynomial, "isolate needs a non-constant polynomial");
  // den · 2^e · A(x) − num = 0 with everything integral.
  mpz_class num = y.get_num(), den = y.get_den();
  std::int64_t e = p.scale_exponent;
  for (auto& c : q) {
    c *= den;
    if (e > 0) mpz_mul_2exp(c.get_mpz_t(), c.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
  }
  if (e < 0) mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
  q[0] -= num;
  return {isolate_roots(q, DyadicInterval::unit(), n)};
}

/// Number of distinct real roots of P inside I; endpoints must not be roots.
inline int sturm_count(const PowerPolyInt& p, const DyadicInterval& iv) {
  IntPoly q = p.coeffs;
  poly::trim(q);
  if (poly::is_zero(q)) throw Error(Errc::ConstantPolynomial, "zero polynomial");
  if (poly::degree(q) < 1) return 0;
  IntPoly sf = poly::square_free(q);
  if (poly::sign_at(sf, iv.lo()) == 0 || poly::sign_at(sf, iv.hi()) == 0)
    throw Error(Errc::EndpointRoot, "interval endpoint is a root");
  SturmSequence s(sf);
  return s.variations(iv.lo()) - s.variations(iv.hi());
}

namespace detail {

inline bool nonneg_on(const IntPoly& q, const IntPoly& sf, const SturmSequence& s, const Dyadic& lo, const Dyadic& hi,
                      int depth) {
  charge_nodes(1);
  int inside = s.variations(lo) - s.variations(hi) - (poly::sign_at(sf, hi) == 0 ? 1 : 0);
  Dyadic mid = (lo + hi).shifted(-1);
  if (inside == 0) return poly::sign_at(q, mid) >= 0;
  if (inside == 1 && poly::sign_at(sf, lo) != 0 && poly::sign_at(sf, hi) != 0)
    return poly::sign_at(q, lo) >= 0 && poly::sign_at(q, hi) >= 0;
  if (poly::sign_at(q, mid) < 0) return false;
  if (depth > 4096) throw Error(Errc::Timeout, "nonnegativity certificate did not terminate");
  return nonneg_on(q, sf, s, lo, mid, depth + 1) && nonneg_on(q, sf, s, mid, hi, depth + 1);
}

}  // namespace detail

/// Decides exactly whether q ≥ 0 on the closed interval.
/// Between consecutive distinct roots the sign is constant, so it suffices to separate the
/// roots by bisection and test one dyadic point per root-free piece.
inline bool certify_nonnegative(IntPoly q, const DyadicInterval& iv) {
  poly::trim(q);
  if (poly::is_zero(q)) return true;
  if (poly::sign_at(q, iv.lo()) < 0 || poly::sign_at(q, iv.hi()) < 0) return false;
  if (poly::degree(q) < 1) return true;
  if (iv.lo() == iv.hi()) return true;
  IntPoly sf = poly::square_free(q);
  if (poly::degree(sf) < 1) return poly::sign_at(q, iv.lo()) >= 0;
  SturmSequence s(sf);
  return detail::nonneg_on(q, sf, s, iv.lo(), iv.hi(), 0);
}

}  // namespace fnreps
