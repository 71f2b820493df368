#pragma once

// Exact size counts behind the Poly / PAff separation.

#include <cstdint>

#include <gmpxx.h>

#include "fnreps/elementary.hpp"

namespace fnreps {

/// Fewest segments of a piecewise linear interpolant of x² on [-1,1] with error < 2^-n.
/// The interpolant's error on [a, b] is (x − a)(b − x) ≤ (b − a)²/4, attained at the midpoint,
/// so only the widest segment matters and the equal partition is optimal.
inline long paff_min_segments_x2(std::int64_t n) {
  mpq_class bound(1);
  mpq_div_2exp(bound.get_mpq_t(), bound.get_mpq_t(), static_cast<mp_bitcnt_t>(n));
  for (long m = 1;; ++m) {
    mpq_class a(-1), h(2, m);
    h.canonicalize();
    mpq_class worst = 0;
    for (long i = 0; i < m; ++i) {
      mpq_class b = a + h, mid = (a + b) / 2;
      mpq_class lin = a * a + (b * b - a * a) * (mid - a) / h;
      worst = std::max(worst, mpq_class(lin - mid * mid));
      a = b;
    }
    if (worst < bound) return m;
  }
}

/// Smallest degree of a truncated Chebyshev series of |x| with sup error ≤ 2^-n.
/// Truncating after T_{2K} leaves exactly 2/(π(2K+1)), attained at x = 0; the comparison
/// uses a rigorous enclosure of π and is decided only when the enclosure separates.
inline long abs_min_cheb_degree(std::int64_t n) {
  Ball pi = pi_ball(n + 64);
  mpq_class lo = pi.lo().to_mpq(), hi = pi.hi().to_mpq();
  mpz_class two_n1;
  mpz_ui_pow_ui(two_n1.get_mpz_t(), 2, static_cast<unsigned long>(n + 1));
  for (long K = 0;; ++K) {
    // 2/(π(2K+1)) ≤ 2^-n  ⟺  π(2K+1) ≥ 2^(n+1)
    mpq_class odd(2 * K + 1);
    if (lo * odd >= two_n1) return 2 * K;
    if (hi * odd >= two_n1) throw Error(Errc::Timeout, "π enclosure too coarse to decide");
  }
}

}  // namespace fnreps
