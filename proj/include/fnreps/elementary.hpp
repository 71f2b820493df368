#pragma once

// Rigorous π, sine and cosine on balls.

#include <cmath>
#include <mutex>

#include "fnreps/dyadic.hpp"

namespace fnreps {

namespace detail {

// Σ_j (-1)^j / ((2j+1) k^(2j+1)) in fixed point 2^-bits; returns (value, error bound in ulps).
inline std::pair<mpz_class, long> atan_inv_fixed(unsigned long k, std::int64_t bits) {
  mpz_class one;
  mpz_ui_pow_ui(one.get_mpz_t(), 2, static_cast<unsigned long>(bits));
  mpz_class power = one / k;  // floor(2^bits / k^(2j+1))
  mpz_class k2 = k * k;
  mpz_class sum = 0;
  long terms = 0;
  for (unsigned long j = 0; power != 0; ++j) {
    mpz_class t = power / (2 * j + 1);
    if (j % 2 == 0)
      sum += t;
    else
      sum -= t;
    power /= k2;
    ++terms;
  }
  // Each truncated division loses < 1 ulp in power and in t; the tail is below one ulp.
  return {sum, 2 * terms + 2};
}

}  // namespace detail

/// π as a ball of radius ≤ 2^-bits.
inline Ball pi_ball(std::int64_t bits) {
  static std::mutex mu;
  static Ball cached;
  static std::int64_t cached_bits = -1;
  std::lock_guard<std::mutex> lock(mu);
  if (cached_bits >= bits) return cached;
  std::int64_t w = std::max<std::int64_t>(bits, 64) + 16;
  auto [a5, e5] = detail::atan_inv_fixed(5, w);
  auto [a239, e239] = detail::atan_inv_fixed(239, w);
  mpz_class v = 16 * a5 - 4 * a239;
  long err = 16 * e5 + 4 * e239;
  cached = Ball(Dyadic(v, -w), Dyadic(mpz_class(err), -w));
  cached_bits = w - 12;
  return cached;
}

namespace detail {

// Taylor sum Σ (-1)^j y^(2j+start)/(2j+start)! for |y| ≤ 4, rigorous remainder added.
inline Ball trig_series(const Ball& y, int start, std::int64_t bits) {
  std::int64_t w = bits + 8;
  Ball y2 = (y * y).rounded(w);
  Ball term = start == 0 ? Ball(1) : y;
  Ball sum = term;
  for (unsigned long j = static_cast<unsigned long>(start);; j += 2) {
    term = (-(term * y2)).rounded(w).div_int((j + 1) * (j + 2), w);
    if (term.mag() < Dyadic::pow2(-bits - 4)) {
      // Lagrange remainder of the truncated series is bounded by the next term.
      sum = sum.widened(term.mag());
      break;
    }
    sum += term;
  }
  return sum.rounded(bits + 2);
}

// Reduces the exact center modulo 2π; returns y with c ≡ y and |y| ≤ π + small.
inline Ball reduce_2pi(const Dyadic& c, std::int64_t bits) {
  double cd = c.to_double();
  if (std::fabs(cd) < 3.2) return Ball(c);
  auto k = static_cast<long>(std::floor(cd / (2 * M_PI) + 0.5));
  std::int64_t kb = static_cast<std::int64_t>(std::ceil(std::log2(std::fabs(static_cast<double>(k)) + 1)));
  Ball twopi = pi_ball(bits + kb + 4).shifted(1);
  return (Ball(c) - Ball(Dyadic(k)) * twopi).rounded(bits + 4);
}

inline Ball clamp_unit(const Ball& b) {
  Dyadic lo = max(b.lo(), Dyadic(-1)), hi = min(b.hi(), Dyadic(1));
  return Ball::from_interval(lo, hi);
}

}  // namespace detail

/// sin over a ball: sin(c) ± r, intersected with [-1,1]; center accuracy 2^-bits.
inline Ball sin(const Ball& x, std::int64_t bits) {
  if (x.radius() >= Dyadic(2)) return Ball(0, Dyadic(1));
  Ball y = detail::reduce_2pi(x.center(), bits + 4);
  Ball s = detail::trig_series(y, 1, bits + 2).widened(x.radius());
  return detail::clamp_unit(s);
}

inline Ball cos(const Ball& x, std::int64_t bits) {
  if (x.radius() >= Dyadic(2)) return Ball(0, Dyadic(1));
  Ball y = detail::reduce_2pi(x.center(), bits + 4);
  Ball s = detail::trig_series(y, 0, bits + 2).widened(x.radius());
  return detail::clamp_unit(s);
}

}  // namespace fnreps
