#pragma once

// Polynomial enclosures in the Chebyshev basis on [-1,1].
//
// A ChebEnclosure {c_k, err} denotes every continuous f on [-1,1] with
// ‖f − Σ c_k T_k‖_∞ ≤ err. Since |T_k| ≤ 1 the coefficient ℓ¹ norm bounds the sup norm,
// and that is the only sup-norm estimate used below.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fnreps/budget.hpp"
#include "fnreps/dyadic.hpp"
#include "fnreps/elementary.hpp"
#include "fnreps/roots.hpp"

namespace fnreps {

struct ChebEnclosure {
  std::map<int, Dyadic> coeffs;  // no explicit zeros
  Dyadic err;

  ChebEnclosure() = default;
  ChebEnclosure(const Dyadic& c) { set(0, c); }  // NOLINT: constants convert implicitly

  static ChebEnclosure from_coeffs(const std::vector<Dyadic>& c, const Dyadic& err = {}) {
    ChebEnclosure p;
    for (std::size_t k = 0; k < c.size(); ++k) p.set(static_cast<int>(k), c[k]);
    p.err = err;
    return p;
  }
  /// The single basis polynomial c·T_k.
  static ChebEnclosure basis(int k, const Dyadic& c = Dyadic(1)) {
    ChebEnclosure p;
    p.set(k, c);
    return p;
  }

  int degree() const { return coeffs.empty() ? 0 : coeffs.rbegin()->first; }
  bool is_exact() const { return err.is_zero(); }
  std::size_t terms() const { return coeffs.size(); }

  Dyadic coeff(int k) const {
    auto it = coeffs.find(k);
    return it == coeffs.end() ? Dyadic() : it->second;
  }
  void set(int k, const Dyadic& c) {
    if (c.is_zero())
      coeffs.erase(k);
    else
      coeffs[k] = c;
  }
  void add_to(int k, const Dyadic& c) { set(k, coeff(k) + c); }

  /// Center polynomial without the error radius.
  ChebEnclosure center() const {
    ChebEnclosure p = *this;
    p.err = Dyadic();
    return p;
  }

  friend bool operator==(const ChebEnclosure& a, const ChebEnclosure& b) {
    return a.coeffs == b.coeffs && a.err == b.err;
  }
};

/// Upper bound on Σ|c_k| (rounded up to 64 significant bits).
inline Dyadic l1_norm(const ChebEnclosure& p) {
  Dyadic s;
  for (const auto& [k, c] : p.coeffs) s = (s + c.abs().round_up_magnitude()).round_up_magnitude();
  return s;
}

/// Upper bound on sup |f| over the denotation.
inline Dyadic sup_bound(const ChebEnclosure& p) { return (l1_norm(p) + p.err).round_up_magnitude(); }

/// Σ k²|c_k|, a Lipschitz constant of the center polynomial on [-1,1] since |T_k'| ≤ k².
inline Dyadic lipschitz_bound(const ChebEnclosure& p) {
  Dyadic s;
  for (const auto& [k, c] : p.coeffs)
    if (k > 0) s = (s + c.abs().round_up_magnitude() * Dyadic(static_cast<long>(k) * k)).round_up_magnitude();
  return s;
}

/// Markov's inequality with the ℓ¹ bound: deg² · ‖p‖₁ ≥ ‖p'‖_∞.
inline Dyadic markov_bound(const ChebEnclosure& p) {
  long n = p.degree();
  return (Dyadic(n * n) * l1_norm(p)).round_up_magnitude();
}

inline ChebEnclosure operator+(const ChebEnclosure& a, const ChebEnclosure& b) {
  ChebEnclosure r = a;
  for (const auto& [k, c] : b.coeffs) r.add_to(k, c);
  r.err = (a.err + b.err).round_up_magnitude();
  return r;
}
inline ChebEnclosure operator-(const ChebEnclosure& a) {
  ChebEnclosure r = a;
  for (auto& [k, c] : r.coeffs) c = -c;
  return r;
}
inline ChebEnclosure operator-(const ChebEnclosure& a, const ChebEnclosure& b) { return a + (-b); }

/// Exact multiplication by a dyadic.
inline ChebEnclosure cheb_scale(const ChebEnclosure& p, const Dyadic& s) {
  if (s.is_zero()) return {};
  ChebEnclosure r;
  for (const auto& [k, c] : p.coeffs) r.coeffs.emplace(k, c * s);
  r.err = (p.err * s.abs()).round_up_magnitude();
  return r;
}

/// Multiplication by a ball s: center scaled by s's center, s's radius charged to err.
inline ChebEnclosure cheb_scale(const ChebEnclosure& p, const Ball& s) {
  ChebEnclosure r = cheb_scale(p, s.center());
  r.err = (r.err + s.radius() * sup_bound(p)).round_up_magnitude();
  return r;
}

namespace detail {

// Coefficients as integers times 2^e, dense up to the degree.
inline std::vector<mpz_class> dense_ints(const ChebEnclosure& p, std::int64_t& e) {
  e = 0;
  bool first = true;
  for (const auto& [k, c] : p.coeffs) {
    e = first ? c.exponent() : std::min(e, c.exponent());
    first = false;
  }
  std::vector<mpz_class> v(p.coeffs.empty() ? 0 : static_cast<std::size_t>(p.degree()) + 1);
  for (const auto& [k, c] : p.coeffs)
    mpz_mul_2exp(v[k].get_mpz_t(), c.mantissa().get_mpz_t(), static_cast<mp_bitcnt_t>(c.exponent() - e));
  return v;
}

// Kronecker substitution: packs signed digits of width k limbs into one integer.
inline mpz_class kron_pack(const std::vector<mpz_class>& v, std::size_t k) {
  std::size_t n = v.size() * k;
  mpz_class pos, neg;
  mp_limb_t* pp = mpz_limbs_write(pos.get_mpz_t(), static_cast<mp_size_t>(n));
  mp_limb_t* np = mpz_limbs_write(neg.get_mpz_t(), static_cast<mp_size_t>(n));
  std::fill(pp, pp + n, 0);
  std::fill(np, np + n, 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const mpz_srcptr z = v[i].get_mpz_t();
    const mp_limb_t* src = mpz_limbs_read(z);
    std::copy(src, src + mpz_size(z), (mpz_sgn(z) > 0 ? pp : np) + i * k);
  }
  mpz_limbs_finish(pos.get_mpz_t(), static_cast<mp_size_t>(n));
  mpz_limbs_finish(neg.get_mpz_t(), static_cast<mp_size_t>(n));
  return pos - neg;
}

// Inverse of kron_pack for `count` digits, each strictly within ±2^(64k−1).
inline std::vector<mpz_class> kron_unpack(const mpz_class& z, std::size_t k, std::size_t count) {
  std::vector<mpz_class> out(count);
  int sign = sgn(z);
  mpz_class az = abs(z);
  std::size_t limbs = mpz_size(az.get_mpz_t());
  const mp_limb_t* src = mpz_limbs_read(az.get_mpz_t());
  mpz_class half, full;
  mpz_setbit(half.get_mpz_t(), 64 * k - 1);
  mpz_setbit(full.get_mpz_t(), 64 * k);
  bool carry = false;
  for (std::size_t t = 0; t < count; ++t) {
    std::size_t start = t * k;
    mpz_class d;
    if (start < limbs) {
      mpz_t view;
      mpz_roinit_n(view, src + start, static_cast<mp_size_t>(std::min(k, limbs - start)));
      d = mpz_class(view);
    }
    if (carry) d += 1;
    carry = d >= half;
    if (carry) d -= full;
    out[t] = sign < 0 ? mpz_class(-d) : d;
  }
  return out;
}

inline std::size_t max_bits(const std::vector<mpz_class>& v) {
  std::size_t b = 0;
  for (const auto& x : v) b = std::max(b, mpz_sizeinbase(x.get_mpz_t(), 2));
  return b;
}

// acc[s] = Σ_{m+n=s} a_m b_n + Σ_{|m−n|=s} a_m b_n via two big-integer products.
inline std::vector<mpz_class> cheb_product_kronecker(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) {
  std::size_t la = a.size(), lb = b.size();
  std::size_t guard = static_cast<std::size_t>(Dyadic(static_cast<long>(std::min(la, lb))).ceil_log2());
  std::size_t k = (max_bits(a) + max_bits(b) + guard + 2 + 63) / 64;
  mpz_class A = kron_pack(a, k);
  std::vector<mpz_class> brev(b.rbegin(), b.rend());
  auto acc = kron_unpack(A * kron_pack(b, k), k, la + lb - 1);
  auto corr = kron_unpack(A * kron_pack(brev, k), k, la + lb - 1);
  std::size_t B = lb - 1;
  for (std::size_t s = 0; s < acc.size(); ++s) {
    if (B + s < corr.size()) acc[s] += corr[B + s];
    if (s > 0 && s <= B) acc[s] += corr[B - s];
  }
  return acc;
}

}  // namespace detail

/// Product via T_m·T_n = (T_{m+n} + T_{|m−n|})/2. The centers multiply exactly.
inline ChebEnclosure operator*(const ChebEnclosure& p, const ChebEnclosure& q) {
  ChebEnclosure r;
  if (!p.coeffs.empty() && !q.coeffs.empty()) {
    note_degree(static_cast<std::size_t>(p.degree() + q.degree()));
    charge_nodes(p.terms() * q.terms() / 64 + 1);
    std::int64_t ep = 0, eq = 0;
    auto a = detail::dense_ints(p, ep);
    auto b = detail::dense_ints(q, eq);
    std::vector<mpz_class> acc;
    if (std::min(p.terms(), q.terms()) >= 24) {
      acc = detail::cheb_product_kronecker(a, b);
    } else {
      acc.resize(a.size() + b.size() - 1);
      for (const auto& [m, cm] : p.coeffs) {
        const mpz_class& am = a[m];
        for (const auto& [n, cn] : q.coeffs) {
          mpz_addmul(acc[m + n].get_mpz_t(), am.get_mpz_t(), b[n].get_mpz_t());
          mpz_addmul(acc[m > n ? m - n : n - m].get_mpz_t(), am.get_mpz_t(), b[n].get_mpz_t());
        }
      }
    }
    for (std::size_t k = 0; k < acc.size(); ++k)
      if (acc[k] != 0) r.coeffs.emplace(static_cast<int>(k), Dyadic(std::move(acc[k]), ep + eq - 1));
  }
  if (!p.err.is_zero() || !q.err.is_zero()) {
    Dyadic np = l1_norm(p), nq = l1_norm(q);
    r.err = (np * q.err + nq * p.err + p.err * q.err).round_up_magnitude();
  }
  return r;
}

/// Drops the smallest terms while their total stays within 2^-(target+2), adding it to err.
inline ChebEnclosure sweep(const ChebEnclosure& p, std::int64_t target) {
  std::vector<std::pair<Dyadic, int>> mags;
  mags.reserve(p.coeffs.size());
  for (const auto& [k, c] : p.coeffs) mags.emplace_back(c.abs(), k);
  std::sort(mags.begin(), mags.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  Dyadic limit = Dyadic::pow2(-target - 2), removed;
  ChebEnclosure r = p;
  for (const auto& [m, k] : mags) {
    Dyadic next = removed + m;
    if (next > limit) break;
    removed = next;
    r.coeffs.erase(k);
  }
  r.err = (r.err + removed).round_up_magnitude();
  return r;
}

/// Rounds coefficients onto a grid fine enough for `target`, then sweeps.
inline ChebEnclosure size_reduce(const ChebEnclosure& p, std::int64_t target) {
  std::int64_t grid = target + 4;
  if (p.terms() > 1) grid += Dyadic(static_cast<long>(p.terms())).ceil_log2();
  ChebEnclosure r;
  Dyadic moved;
  for (const auto& [k, c] : p.coeffs) {
    Dyadic rc = c.round_nearest(grid);
    moved += (c - rc).abs();
    r.set(k, rc);
  }
  r.err = (p.err + moved).round_up_magnitude();
  return sweep(r, target);
}

namespace detail {

inline void require_unit(const Ball& x) {
  if (x.lo() < Dyadic(-1) || x.hi() > Dyadic(1))
    throw Error(Errc::DomainViolation, "point " + x.str() + " outside [-1,1]");
}

// Clenshaw at an exact point with ball coefficients. Rounding b_k to the 2^-w grid changes
// the result exactly as perturbing c_k would, so each rounding costs at most its size
// (|T_k| ≤ 1); the coefficient radii are charged the same way.
inline Ball clenshaw(const std::vector<Ball>& c, const Dyadic& x, std::optional<std::int64_t> w) {
  if (c.empty()) return Ball(0);
  Dyadic b1, b2, slack;
  auto round = [&](Dyadic v) {
    if (!w) return v;
    Dyadic r = v.round_nearest(*w);
    slack += (v - r).abs();
    return r;
  };
  Dyadic two_x = x.shifted(1);
  for (std::size_t k = c.size() - 1; k >= 1; --k) {
    Dyadic b0 = round(c[k].center() + two_x * b1 - b2);
    b2 = std::move(b1);
    b1 = std::move(b0);
  }
  Dyadic r = round(c[0].center() + x * b1 - b2);
  for (const auto& ck : c) slack += ck.radius();
  return Ball(r, slack);
}

inline std::vector<Ball> dense_balls(const ChebEnclosure& p) {
  std::vector<Ball> v(p.coeffs.empty() ? 0 : static_cast<std::size_t>(p.degree()) + 1, Ball(0));
  for (const auto& [k, c] : p.coeffs) v[k] = Ball(c);
  return v;
}

}  // namespace detail

/// Encloses f(ξ) for every f in p and ξ in x.
/// With `bits` set the Clenshaw recurrence is rounded so that it contributes about 2^-bits;
/// otherwise it runs exactly at the center of x.
inline Ball cheb_eval(const ChebEnclosure& p, const Ball& x, std::optional<std::int64_t> bits = std::nullopt) {
  detail::require_unit(x);
  std::optional<std::int64_t> w;
  if (bits) w = *bits + 2 + Dyadic(static_cast<long>(p.degree()) + 1).ceil_log2();
  Ball v = detail::clenshaw(detail::dense_balls(p), x.center(), w);
  if (!x.is_exact()) {
    v = v.widened((lipschitz_bound(p) * x.radius()).round_up_magnitude());
    Ball range(Dyadic(), l1_norm(p));
    if (range.radius() < v.radius()) v = v.intersect(range);
  }
  return v.widened(p.err);
}

/// Exact derivative of the center polynomial: c'_{k-1} = c'_{k+1} + 2k·c_k, with c'_0 halved.
inline ChebEnclosure cheb_derivative(const ChebEnclosure& p) {
  int n = p.degree();
  if (n == 0) return {};
  std::vector<Dyadic> d(static_cast<std::size_t>(n) + 2);
  for (int k = n; k >= 1; --k) d[k - 1] = d[k + 1] + p.coeff(k) * Dyadic(2L * k);
  d[0] = d[0].shifted(-1);
  d.resize(static_cast<std::size_t>(n));
  return ChebEnclosure::from_coeffs(d);
}

/// Exact Chebyshev coefficients of the antiderivative vanishing at 0 up to a constant.
/// Entries are balls because ∫T_k introduces divisions by 2(k±1).
namespace detail {

inline Ball div_exact_or_round(const Dyadic& c, long k, std::int64_t w) {
  if ((k & (k - 1)) == 0) return Ball(c.shifted(-Dyadic(k).floor_log2()));
  return Ball(c).div_int(static_cast<unsigned long>(k), w);
}

inline std::vector<Ball> antiderivative(const ChebEnclosure& p, std::int64_t w) {
  std::vector<Ball> f(static_cast<std::size_t>(p.degree()) + 2, Ball(0));
  for (const auto& [k, c] : p.coeffs) {
    if (k == 0) {
      f[1] += Ball(c);
    } else if (k == 1) {
      f[2] += Ball(c.shifted(-2));
    } else {
      f[k + 1] += div_exact_or_round(c, 2L * (k + 1), w);
      f[k - 1] -= div_exact_or_round(c, 2L * (k - 1), w);
    }
  }
  return f;
}

}  // namespace detail

/// ∫_a^b f over the denotation, endpoints as balls inside [-1,1].
inline Ball cheb_integrate(const ChebEnclosure& p, const Ball& a, const Ball& b, std::int64_t prec = 64) {
  detail::require_unit(a);
  detail::require_unit(b);
  std::int64_t w = prec + 4 + Dyadic(static_cast<long>(p.degree()) + 2).ceil_log2();
  auto f = detail::antiderivative(p, w);
  Ball v = detail::clenshaw(f, b.center(), w) - detail::clenshaw(f, a.center(), w);
  Dyadic ends = a.radius() + b.radius();
  Dyadic span = (b.center() - a.center()).abs() + ends;
  return v.widened((p.err * span + sup_bound(p) * ends).round_up_magnitude());
}

/// Exact conversion of the center polynomial to 2^e · Σ a_i x^i with integer a_i.
inline PowerPolyInt to_power_basis(const ChebEnclosure& p) {
  if (p.coeffs.empty()) return PowerPolyInt{{mpz_class(0)}, 0};
  std::int64_t e = 0;
  auto c = detail::dense_ints(p, e);
  // Clenshaw over polynomials in x: b_k = c_k + 2x·b_{k+1} − b_{k+2}, result c_0 + x·b_1 − b_2.
  std::size_t n = c.size() - 1;
  std::vector<mpz_class> b1, b2;
  for (std::size_t k = n; k >= 1; --k) {
    std::vector<mpz_class> b0(std::max(b1.size() + 1, b2.size()));
    if (b0.empty()) b0.resize(1);
    b0[0] += c[k];
    for (std::size_t i = 0; i < b1.size(); ++i) b0[i + 1] += 2 * b1[i];
    for (std::size_t i = 0; i < b2.size(); ++i) b0[i] -= b2[i];
    b2 = std::move(b1);
    b1 = std::move(b0);
    charge_nodes(1);
  }
  std::vector<mpz_class> r(std::max(b1.size() + 1, std::max<std::size_t>(b2.size(), 1)));
  r[0] += c[0];
  for (std::size_t i = 0; i < b1.size(); ++i) r[i + 1] += b1[i];
  for (std::size_t i = 0; i < b2.size(); ++i) r[i] -= b2[i];
  PowerPolyInt out{std::move(r), e};
  poly::trim(out.coeffs);
  // Pull common factors of two into the exponent.
  if (!poly::is_zero(out.coeffs)) {
    mp_bitcnt_t tz = ~mp_bitcnt_t{0};
    for (const auto& a : out.coeffs)
      if (a != 0) tz = std::min(tz, mpz_scan1(a.get_mpz_t(), 0));
    for (auto& a : out.coeffs) mpz_fdiv_q_2exp(a.get_mpz_t(), a.get_mpz_t(), tz);
    out.scale_exponent += static_cast<std::int64_t>(tz);
  } else {
    out.scale_exponent = 0;
  }
  return out;
}

/// Exact conversion from power-basis coefficients a_0..a_d:
/// x^k = 2^(1−k) Σ_j binom(k,j) T_{k−2j}, the middle term (k even) taken once at half weight.
inline ChebEnclosure from_power_basis(const std::vector<Dyadic>& a) {
  ChebEnclosure r;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].is_zero()) continue;
    if (k == 0) {
      r.add_to(0, a[0]);
      continue;
    }
    mpz_class binom = 1;
    for (std::size_t j = 0; 2 * j <= k; ++j) {
      if (j > 0) binom = binom * static_cast<unsigned long>(k - j + 1) / static_cast<unsigned long>(j);
      std::int64_t sh = 1 - static_cast<std::int64_t>(k);
      if (2 * j == k) sh -= 1;
      r.add_to(static_cast<int>(k - 2 * j), a[k] * Dyadic(binom, sh));
    }
  }
  return r;
}

inline ChebEnclosure from_power_basis(const PowerPolyInt& p) { return from_power_basis(p.to_dyadics()); }

namespace detail {

// Maximum of the exact polynomial p over [lo, hi]; radius ≤ 2^-(n+2).
inline Ball max_on(const ChebEnclosure& p, const Dyadic& lo, const Dyadic& hi, std::int64_t n) {
  Ball best = cheb_eval(p, Ball(lo), n + 4);
  best = ball_max(best, cheb_eval(p, Ball(hi), n + 4));
  if (p.degree() < 2 || lo == hi) return best;
  Dyadic lip = lipschitz_bound(p);
  std::int64_t nn = n + 2 + (lip.is_zero() ? 0 : std::max<std::int64_t>(0, lip.ceil_log2()));
  PowerPolyInt pp = to_power_basis(p);
  for (const auto& iv : isolate_roots(poly::derivative(pp.coeffs), DyadicInterval(lo, hi), nn))
    best = ball_max(best, cheb_eval(p, Ball::from_interval(iv), n + 4));
  return best;
}

}  // namespace detail

/// Encloses max_{x∈[α,β]} f(x) for all α∈a, β∈b and f in p; radius ≤ 2^-n + err for exact ends.
inline Ball cheb_range_max(const ChebEnclosure& p, const Ball& a, const Ball& b, std::int64_t n) {
  detail::require_unit(a);
  detail::require_unit(b);
  if (b.hi() < a.lo()) throw Error(Errc::DomainViolation, "empty range [a,b]");
  ChebEnclosure c = p.center();
  Ball outer = detail::max_on(c, a.lo(), b.hi(), n);
  Ball inner_lo;
  if (a.hi() <= b.lo())
    inner_lo = detail::max_on(c, a.hi(), b.lo(), n);
  else
    inner_lo = cheb_eval(c, a, n + 4);
  return Ball::from_interval(min(inner_lo.lo(), outer.lo()), outer.hi()).widened(p.err);
}

namespace detail {

// Horner evaluation of the truncated sine (odd) or cosine (even) Taylor series at q, with
// the Lagrange remainder for |q| ≤ B. Size reduction happens at w bits after each product.
inline ChebEnclosure taylor_trig(const ChebEnclosure& q, bool odd, const Dyadic& B, std::int64_t n, std::int64_t w) {
  mpq_class b = B.to_mpq(), tol = Dyadic::pow2(-n - 3).to_mpq();
  // Smallest J whose first omitted term B^m/m! is below tol, m = 2J+3 (sine) or 2J+2.
  mpq_class term = odd ? b : mpq_class(1);
  long m = odd ? 1 : 0, J = -1;
  mpq_class rem;
  for (;;) {
    ++J;
    term *= b * b / ((m + 1) * (m + 2));
    m += 2;
    if (term <= tol || J > 4096) {
      rem = term;
      break;
    }
  }
  ChebEnclosure q2 = size_reduce(q * q, w);
  ChebEnclosure h(Dyadic(1));
  for (long j = J; j >= 1; --j) {
    unsigned long den = odd ? static_cast<unsigned long>((2 * j) * (2 * j + 1))
                            : static_cast<unsigned long>((2 * j - 1) * (2 * j));
    Ball inv = Ball(Dyadic(1)).div_int(den, w + 8);
    h = ChebEnclosure(Dyadic(1)) - cheb_scale(size_reduce(q2 * h, w), inv);
    h = size_reduce(h, w);
    check_deadline();
  }
  if (odd) h = size_reduce(q * h, w);
  Dyadic remd = div_ceil(Dyadic(mpz_class(rem.get_num()), 0), Dyadic(mpz_class(rem.get_den()), 0), n + 8);
  h.err = (h.err + remd).round_up_magnitude();
  return h;
}

inline ChebEnclosure cheb_trig(const ChebEnclosure& p, std::int64_t n, bool is_sin) {
  Dyadic c0 = p.coeff(0);
  ChebEnclosure q = p.center();
  q.set(0, Dyadic());
  Dyadic B = l1_norm(q);
  std::int64_t guard = static_cast<std::int64_t>(std::ceil(1.45 * B.to_double())) + 4;
  if (!B.is_zero()) guard += std::max<std::int64_t>(0, B.ceil_log2()) + 4;
  for (;; guard += 8) {
    std::int64_t w = n + guard;
    Ball s0 = sin(Ball(c0), w + 2), k0 = cos(Ball(c0), w + 2);
    ChebEnclosure r;
    if (B.is_zero()) {
      r = cheb_scale(ChebEnclosure(Dyadic(1)), is_sin ? s0 : k0);
    } else {
      ChebEnclosure sq = taylor_trig(q, true, B, n + 2, w);
      ChebEnclosure cq = taylor_trig(q, false, B, n + 2, w);
      if (is_sin)
        r = cheb_scale(cq, s0) + cheb_scale(sq, k0);
      else
        r = cheb_scale(cq, k0) - cheb_scale(sq, s0);
    }
    r = size_reduce(r, n + 2);
    if (r.err <= Dyadic::pow2(-n) || guard > n + 4096) {
      r.err = (r.err + p.err).round_up_magnitude();
      return r;
    }
  }
}

}  // namespace detail

/// sin∘f for every f in p, error ≤ 2^-n + err(p).
inline ChebEnclosure cheb_sin(const ChebEnclosure& p, std::int64_t n) { return detail::cheb_trig(p, n, true); }
/// cos∘f for every f in p, error ≤ 2^-n + err(p).
inline ChebEnclosure cheb_cos(const ChebEnclosure& p, std::int64_t n) { return detail::cheb_trig(p, n, false); }

/// outer∘inner. Inner values must stay in [-1,1], which is checked via ‖inner‖₁ + err ≤ 1.
/// Intermediate Clenshaw terms are size-reduced at target+guard. Pointwise this is the scalar
/// recurrence at y = inner(x) ∈ [-1,1] with c_k perturbed, so each reduction costs its own err.
inline ChebEnclosure cheb_compose(const ChebEnclosure& outer, const ChebEnclosure& inner,
                                  std::optional<std::int64_t> target) {
  ChebEnclosure x = inner.center();
  if (sup_bound(inner) > Dyadic(1)) {
    // The ℓ¹ norm is only a bound; an exact inner map may still stay within [-1,1] pointwise.
    bool inside = inner.is_exact() &&
                  certify_nonnegative(to_power_basis(ChebEnclosure(Dyadic(1)) - x).coeffs, DyadicInterval::unit()) &&
                  certify_nonnegative(to_power_basis(ChebEnclosure(Dyadic(1)) + x).coeffs, DyadicInterval::unit());
    if (!inside) throw Error(Errc::DomainViolation, "inner polynomial leaves [-1,1]");
  }
  int n = outer.degree();
  std::int64_t w = target ? *target + 2 + Dyadic(static_cast<long>(n) + 1).ceil_log2() : 0;
  Dyadic perturb;
  ChebEnclosure b1, b2;
  auto reduce = [&](ChebEnclosure b) {
    if (!target) return b;
    b = size_reduce(b, w);
    perturb = (perturb + b.err).round_up_magnitude();
    b.err = Dyadic();
    return b;
  };
  for (int k = n; k >= 1; --k) {
    ChebEnclosure b0 = ChebEnclosure(outer.coeff(k)) + cheb_scale(x * b1, Dyadic(2)) - b2;
    b2 = std::move(b1);
    b1 = reduce(std::move(b0));
  }
  ChebEnclosure r = ChebEnclosure(outer.coeff(0)) + x * b1 - b2;
  r = reduce(std::move(r));
  Dyadic e = outer.err + perturb;
  if (!inner.err.is_zero()) e += lipschitz_bound(outer) * inner.err;
  r.err = e.round_up_magnitude();
  return r;
}

/// t ↦ p(α·t + β), exact. A nonzero error radius needs |α| + |β| ≤ 1 to stay meaningful.
inline ChebEnclosure cheb_affine(const ChebEnclosure& p, const Dyadic& alpha, const Dyadic& beta) {
  ChebEnclosure lin = ChebEnclosure::from_coeffs({beta, alpha});
  if (!p.err.is_zero() && alpha.abs() + beta.abs() > Dyadic(1))
    throw Error(Errc::DomainViolation, "affine map leaves [-1,1]");
  ChebEnclosure c = p.center();
  // Exact composition does not need the [-1,1] range of the inner map.
  int n = c.degree();
  ChebEnclosure b1, b2;
  for (int k = n; k >= 1; --k) {
    ChebEnclosure b0 = ChebEnclosure(c.coeff(k)) + cheb_scale(lin * b1, Dyadic(2)) - b2;
    b2 = std::move(b1);
    b1 = std::move(b0);
  }
  ChebEnclosure r = ChebEnclosure(c.coeff(0)) + lin * b1 - b2;
  r.err = p.err;
  return r;
}

/// One "k:c_k" line per term in increasing k, then "err:r".
inline std::string dump(const ChebEnclosure& p) {
  std::ostringstream os;
  for (const auto& [k, c] : p.coeffs) os << k << ':' << c.str() << '\n';
  os << "err:" << p.err.str() << '\n';
  return os.str();
}

}  // namespace fnreps
