#pragma once

// Single-polynomial operations that have no exact polynomial answer: |p|, max(p, q) and 1/p.

#include "fnreps/chebpoly.hpp"
#include "fnreps/elementary.hpp"

namespace fnreps {

/// Truncated Chebyshev series of |t| on [-1,1] up to T_{2K}:
/// |t| = 2/π + Σ_{k≥1} (-1)^(k+1) 4/(π(4k²−1)) T_{2k}. The tail is at most 2/(π(2K+1)).
inline ChebEnclosure abs_series(long K, std::int64_t bits) {
  bits += Dyadic(K + 1).ceil_log2() + 2;  // K rounded coefficients share the 2^-bits budget
  Ball inv_pi = recip(pi_ball(bits + 4), bits + 4);
  ChebEnclosure s;
  Dyadic radii;
  auto put = [&](int k, const Ball& c) {
    Ball r = c.rounded(bits);
    s.set(k, r.center());
    radii += r.radius();
  };
  put(0, inv_pi.shifted(1));
  for (long k = 1; k <= K; ++k) {
    Ball c = inv_pi.shifted(2).div_int(static_cast<unsigned long>(4 * k * k - 1), bits + 2);
    put(static_cast<int>(2 * k), k % 2 == 1 ? c : -c);
  }
  // π > 3 bounds the tail by 2/(3(2K+1)).
  Dyadic tail = div_ceil(Dyadic(2), Dyadic(3 * (2 * K + 1)), bits + 2);
  s.err = (radii + tail).round_up_magnitude();
  return s;
}

/// Smallest K whose series tail bound 2/(3(2K+1)) is at most 2^-m.
inline long abs_series_terms(std::int64_t m) {
  // 2K + 1 ≥ 2^(m+1)/3
  mpz_class need;
  mpz_ui_pow_ui(need.get_mpz_t(), 2, static_cast<unsigned long>(std::max<std::int64_t>(m + 1, 0)));
  need = (need + 2) / 3;
  mpz_class K = need / 2;
  if (!K.fits_slong_p()) throw Error(Errc::Timeout, "absolute value needs an astronomically large degree");
  return std::max(1L, K.get_si());
}

/// |p| within 2^-n plus err(p). The degree is about 2^n·deg p, which the budget's degree cap limits.
inline ChebEnclosure cheb_abs(const ChebEnclosure& p, std::int64_t n) {
  Dyadic S = sup_bound(p);
  if (S.is_zero()) return ChebEnclosure();
  std::int64_t k = S.ceil_log2();
  ChebEnclosure t = cheb_scale(p, Dyadic::pow2(-k));
  long K = abs_series_terms(n + k + 1);
  note_degree(static_cast<std::size_t>(2 * K) * static_cast<std::size_t>(std::max(1, t.degree())));
  ChebEnclosure series = abs_series(K, n + k + 8);
  // | |t| − S(t_c) | ≤ | |t| − |t_c| | + | |t_c| − S(t_c) | ≤ err(t) + err(S).
  ChebEnclosure r = cheb_compose(series, t.center(), n + k + 3);
  r.err = (r.err + t.err).round_up_magnitude();
  // Series and composition together stay below 1.3·2^-(n+k+1), then sweeping adds 2^-(n+2).
  r = cheb_scale(r, Dyadic::pow2(k));
  return size_reduce(r, n + 2);
}

/// max(f, g) = (f + g + |f − g|)/2.
inline ChebEnclosure cheb_max2(const ChebEnclosure& f, const ChebEnclosure& g, std::int64_t n) {
  ChebEnclosure s = f + g, a = cheb_abs(f - g, n);
  return size_reduce(cheb_scale(s + a, Dyadic::pow2(-1)), n + 1);
}

/// 1/P within 2^-n plus err(P) by Newton iteration Q ← 2Q − PQ² from a constant start.
/// Requires center(P) ≥ 1 + err(P) on [-1,1], certified exactly.
inline ChebEnclosure cheb_recip(const ChebEnclosure& P, std::int64_t n) {
  ChebEnclosure c = P.center();
  auto shifted = to_power_basis(c).to_dyadics();
  shifted[0] -= Dyadic(1) + P.err;
  if (!certify_nonnegative(PowerPolyInt::from_dyadics(shifted).coeffs, DyadicInterval::unit()))
    throw Error(Errc::NotBoundedBelow, "divisor is not certified ≥ 1");
  // P ∈ [1, 2^r]; Q₀ = 2^-r leaves |1 − P·Q₀| ≤ 1 − 2^-r.
  std::int64_t r = std::max<std::int64_t>(0, l1_norm(c).ceil_log2());
  std::int64_t target = n + 4 + r;
  ChebEnclosure Q(Dyadic::pow2(-r));
  Dyadic goal = Dyadic::pow2(-n - 1);
  std::int64_t max_steps = r + Dyadic(std::max<std::int64_t>(n, 1) + 2).ceil_log2() + 8;
  for (std::int64_t step = 0;; ++step) {
    Dyadic cert = l1_norm(ChebEnclosure(Dyadic(1)) - c * Q);
    if (cert <= goal) {
      // |Q − 1/P| = |1 − P·Q|/P ≤ cert, and |1/P − 1/P̃| ≤ err(P) since both are ≥ 1.
      ChebEnclosure out = size_reduce(Q, n + 2);
      out.err = (out.err + cert + P.err).round_up_magnitude();
      return out;
    }
    if (step > max_steps) throw Error(Errc::Timeout, "reciprocal iteration did not converge");
    Q = size_reduce(cheb_scale(Q, Dyadic(2)) - c * size_reduce(Q * Q, target), target).center();
    check_deadline();
  }
}

}  // namespace fnreps
