#pragma once

// Test-only high-precision oracles built on MPFR and GMP rationals. They never call into
// fnreps numerics beyond converting dyadics to exact rationals.

#include <mpfr.h>

#include <functional>
#include <random>
#include <string>

#include "fnreps/dyadic.hpp"

namespace oracle {

inline constexpr mpfr_prec_t kPrec = 320;

class Mp {
 public:
  Mp() { mpfr_init2(v_, kPrec); mpfr_set_zero(v_, 1); }
  Mp(double d) : Mp() { mpfr_set_d(v_, d, MPFR_RNDN); }
  explicit Mp(const mpq_class& q) : Mp() { mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN); }
  explicit Mp(const fnreps::Dyadic& d) : Mp(d.to_mpq()) {}
  Mp(const Mp& o) : Mp() { mpfr_set(v_, o.v_, MPFR_RNDN); }
  Mp& operator=(const Mp& o) { mpfr_set(v_, o.v_, MPFR_RNDN); return *this; }
  ~Mp() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

  friend Mp operator+(const Mp& a, const Mp& b) { Mp r; mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Mp operator-(const Mp& a, const Mp& b) { Mp r; mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Mp operator*(const Mp& a, const Mp& b) { Mp r; mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  friend Mp operator/(const Mp& a, const Mp& b) { Mp r; mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN); return r; }
  Mp operator-() const { Mp r; mpfr_neg(r.v_, v_, MPFR_RNDN); return r; }
  friend bool operator<(const Mp& a, const Mp& b) { return mpfr_less_p(a.v_, b.v_); }

  mpq_class to_mpq() const { mpq_class q; mpfr_get_q(q.get_mpq_t(), v_); return q; }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

 private:
  mpfr_t v_;
};

inline Mp pi() { Mp r; mpfr_const_pi(r.get(), MPFR_RNDN); return r; }
inline Mp sin(const Mp& x) { Mp r; mpfr_sin(r.get(), x.get(), MPFR_RNDN); return r; }
inline Mp cos(const Mp& x) { Mp r; mpfr_cos(r.get(), x.get(), MPFR_RNDN); return r; }
inline Mp atan(const Mp& x) { Mp r; mpfr_atan(r.get(), x.get(), MPFR_RNDN); return r; }
inline Mp sqrt(const Mp& x) { Mp r; mpfr_sqrt(r.get(), x.get(), MPFR_RNDN); return r; }
inline Mp exp(const Mp& x) { Mp r; mpfr_exp(r.get(), x.get(), MPFR_RNDN); return r; }
inline Mp abs(const Mp& x) { Mp r; mpfr_abs(r.get(), x.get(), MPFR_RNDN); return r; }
inline Mp max(const Mp& a, const Mp& b) { return a < b ? b : a; }

/// Ball containment with a 2^-280 allowance for the oracle's own rounding.
inline bool contains(const fnreps::Ball& b, const Mp& v) {
  mpq_class q = v.to_mpq();
  mpq_class slack(1);
  mpq_div_2exp(slack.get_mpq_t(), slack.get_mpq_t(), 280);
  return b.lo().to_mpq() - slack <= q && q <= b.hi().to_mpq() + slack;
}

/// Exact rational Horner evaluation of a power-basis polynomial.
inline mpq_class horner(const std::vector<mpq_class>& c, const mpq_class& x) {
  mpq_class acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

/// Exact value of Σ c_k T_k(x) by the three-term recurrence in rationals.
inline mpq_class cheb_value(const std::vector<std::pair<int, fnreps::Dyadic>>& terms, const mpq_class& x) {
  int deg = 0;
  for (auto& [k, c] : terms) deg = std::max(deg, k);
  std::vector<mpq_class> t(static_cast<std::size_t>(deg) + 1);
  t[0] = 1;
  if (deg >= 1) t[1] = x;
  for (int k = 2; k <= deg; ++k) t[static_cast<std::size_t>(k)] = 2 * x * t[static_cast<std::size_t>(k - 1)] - t[static_cast<std::size_t>(k - 2)];
  mpq_class s = 0;
  for (auto& [k, c] : terms) s += c.to_mpq() * t[static_cast<std::size_t>(k)];
  return s;
}

/// Uniformly random dyadic in [lo, hi] on the 2^-bits grid.
inline fnreps::Dyadic random_dyadic(std::mt19937_64& rng, double lo, double hi, int bits = 30) {
  std::uniform_real_distribution<double> u(lo, hi);
  return fnreps::Dyadic::from_double(u(rng)).round_nearest(bits);
}

/// Composite Gauss–Legendre-free quadrature: Simpson on n panels in MPFR, plus an
/// error bound supplied by the caller via a fourth-derivative bound.
inline Mp simpson(const std::function<Mp(const Mp&)>& f, const Mp& a, const Mp& b, long panels) {
  Mp h = (b - a) / Mp(static_cast<double>(2 * panels));
  Mp s = f(a) + f(b);
  for (long i = 1; i < 2 * panels; ++i) {
    Mp x = a + h * Mp(static_cast<double>(i));
    s = s + f(x) * Mp(i % 2 == 1 ? 4.0 : 2.0);
  }
  return s * h / Mp(3.0);
}

}  // namespace oracle
