#pragma once

// Exact rational evaluation of piecewise enclosures' center functions, for tests.

#include <random>

#include "fnreps/ppoly.hpp"
#include "oracle.hpp"

namespace oracle {

inline mpq_class piece_value(const fnreps::Piece& pc, const mpq_class& x) {
  mpq_class u = (x - pc.mid().to_mpq()) / pc.half().to_mpq();
  std::vector<std::pair<int, fnreps::Dyadic>> t(pc.p.coeffs.begin(), pc.p.coeffs.end());
  return cheb_value(t, u);
}

/// Center value at x and the error of the piece used (left piece at breakpoints).
inline mpq_class pp_value(const fnreps::PPoly& f, const mpq_class& x, mpq_class* err = nullptr) {
  for (const auto& pc : f.pieces)
    if (x <= pc.b.to_mpq()) {
      if (err) *err = pc.err().to_mpq();
      return piece_value(pc, x);
    }
  throw std::out_of_range("point outside domain");
}

/// Random continuous piecewise cubic on [-1,1] with `k` pieces, breakpoints on a 2^-6 grid.
inline fnreps::PPoly random_pp(std::mt19937_64& rng, int k, int deg = 3) {
  using fnreps::Dyadic;
  std::vector<long> cuts;
  std::uniform_int_distribution<long> pos(-63, 63);
  while (static_cast<int>(cuts.size()) < k - 1) {
    long c = pos(rng);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<Dyadic> bp{Dyadic(-1)};
  for (long c : cuts) bp.push_back(Dyadic(mpz_class(c), -6));
  bp.push_back(Dyadic(1));
  std::uniform_int_distribution<long> coef(-256, 256);
  std::vector<fnreps::Piece> ps;
  Dyadic carry;  // value at the left end for continuity
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    fnreps::ChebEnclosure p;
    for (int j = 1; j <= deg; ++j) p.set(j, Dyadic(mpz_class(coef(rng)), -8));
    // Shift so that p(-1) = carry.
    mpq_class at_m1 = 0;
    for (auto& [j, c] : p.coeffs) at_m1 += (j % 2 ? -1 : 1) * c.to_mpq();
    mpq_class scaled = at_m1 * 256;  // denominators divide 2^8
    Dyadic shift = carry - Dyadic(mpz_class(scaled.get_num()), -8);
    p.set(0, shift);
    ps.push_back(fnreps::Piece{bp[i], bp[i + 1], p});
    mpq_class end = 0;
    for (auto& [j, c] : p.coeffs) end += c.to_mpq();
    mpq_class e256 = end * 256;
    carry = Dyadic(mpz_class(e256.get_num()), -8);
  }
  return fnreps::PPoly(std::move(ps));
}

}  // namespace oracle
