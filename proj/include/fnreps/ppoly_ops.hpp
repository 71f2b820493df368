#pragma once

// Pointwise and parametric maximum, composition, and √|f| for piecewise polynomials.
// All four locate special points of the center functions with exact root isolation
// and charge the isolation width to the piece errors through Lipschitz bounds.

#include <optional>
#include <vector>

#include "fnreps/ppoly.hpp"

namespace fnreps {

namespace detail {

inline std::int64_t lip_bits(const Dyadic& l) { return l.is_zero() ? 0 : std::max<std::int64_t>(0, l.ceil_log2()); }

inline Piece constant_piece(const Dyadic& a, const Dyadic& b, const Dyadic& c, const Dyadic& err) {
  ChebEnclosure p(c);
  p.err = err.round_up_magnitude();
  return Piece{a, b, p};
}

inline Piece with_err(Piece pc, const Dyadic& err) {
  pc.p.err = err.round_up_magnitude();
  return pc;
}

// Upper bound on √e for e ≥ 0.
inline Dyadic sqrt_up(const Dyadic& e) {
  if (e.is_zero()) return {};
  mpz_class m = e.mantissa();
  std::int64_t ex = e.exponent() - 128;
  m <<= 128;
  if (ex % 2 != 0) {
    m <<= 1;
    --ex;
  }
  mpz_class s, rem;
  mpz_sqrtrem(s.get_mpz_t(), rem.get_mpz_t(), m.get_mpz_t());
  if (rem != 0) s += 1;
  return Dyadic(s, ex / 2).round_up_magnitude();
}

}  // namespace detail

/// max(f, g). Crossings of the centers become breakpoints at the centers of isolating
/// intervals; within those intervals the two centers differ by at most 2^-(n+2).
inline PPoly pp_max2(const PPoly& f, const PPoly& g, std::int64_t n) {
  std::vector<Piece> out;
  for (const auto& [a, b] : refine(f, g, n + 4)) {
    Dyadic e = max(a.err(), b.err());
    ChebEnclosure d = a.p.center() - b.p.center();
    if (d.degree() == 0) {
      out.push_back(detail::with_err(d.coeff(0).sign() >= 0 ? a : b, e));
      continue;
    }
    PowerPolyInt pw = to_power_basis(d);
    Dyadic L = detail::local_lipschitz(d);
    std::int64_t bits = n + 2 + detail::lip_bits(L);
    auto roots = isolate(pw, 0, bits).intervals;
    Dyadic widest;
    for (const auto& iv : roots) widest = max(widest, iv.diameter());
    Dyadic slack = L * widest;

    // Segment i is [cuts[i], cuts[i+1]]; (gap_lo[i], gap_hi[i]) is its root-free part.
    std::vector<Dyadic> cuts{Dyadic(-1)}, gap_lo{Dyadic(-1)}, gap_hi;
    bool closed = false;
    for (const auto& iv : roots) {
      Dyadic m = iv.midpoint();
      if (m <= Dyadic(-1)) {
        gap_lo.back() = max(gap_lo.back(), iv.hi());
        continue;
      }
      gap_hi.push_back(iv.lo());
      if (m >= Dyadic(1)) {
        cuts.push_back(Dyadic(1));
        closed = true;
        break;
      }
      cuts.push_back(m);
      gap_lo.push_back(iv.hi());
    }
    if (!closed) {
      gap_hi.push_back(Dyadic(1));
      cuts.push_back(Dyadic(1));
    }
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      // Inside an empty gap both centers agree to within the slack, so either will do.
      int s = gap_lo[i] < gap_hi[i] ? pw.eval((gap_lo[i] + gap_hi[i]).shifted(-1)).sign() : 1;
      out.push_back(detail::with_err(restrict_u(s >= 0 ? a : b, cuts[i], cuts[i + 1]), e + slack));
    }
  }
  return PPoly(std::move(out));
}

/// t ↦ max{f(s) : s ≤ t}. Monotone stretches of each piece are either copied or replaced by
/// the running maximum; critical points are isolated to width 2^-(n+3)/L.
inline PPoly pp_paramax(const PPoly& f, std::int64_t n) {
  std::vector<Piece> out;
  auto push = [&out](Piece pc) {
    if (!out.empty() && out.back().p.degree() == 0 && pc.p.degree() == 0 &&
        out.back().p.coeff(0) == pc.p.coeff(0)) {
      out.back().b = pc.b;
      out.back().p.err = max(out.back().p.err, pc.p.err);
      return;
    }
    out.push_back(std::move(pc));
  };

  // Invariant: the running max of the center lies in [M, M + eta].
  std::optional<Dyadic> M;
  Dyadic eta, prefix_err;
  for (const auto& src : f.pieces) {
    prefix_err = max(prefix_err, src.err());
    ChebEnclosure p = src.p.center();
    PowerPolyInt pw = to_power_basis(p);
    M = M ? max(*M, pw.eval(Dyadic(-1))) : pw.eval(Dyadic(-1));
    Dyadic L = detail::local_lipschitz(p);
    std::int64_t bits = n + 3 + detail::lip_bits(L);
    Dyadic cost = L * Dyadic::pow2(-bits);
    Piece cp = src;
    cp.p = p;

    auto constant = [&](const Dyadic& u0, const Dyadic& u1, const Dyadic& value, const Dyadic& err) {
      if (u0 < u1) push(detail::constant_piece(src.x_at(u0), src.x_at(u1), value, err + prefix_err));
    };
    auto copy = [&](const Dyadic& u0, const Dyadic& u1, const Dyadic& err) {
      if (u0 < u1) push(detail::with_err(restrict_u(cp, u0, u1), err + prefix_err));
    };
    auto monotone = [&](const Dyadic& s, const Dyadic& t) {
      Dyadic ps = pw.eval(s), pt = pw.eval(t);
      if (pt <= ps || pt <= *M) {
        constant(s, t, *M, eta);
        return;
      }
      if (ps >= *M) {
        copy(s, t, eta);
      } else {
        // Exactly one crossing p = M inside (s, t).
        Dyadic c = (s + t).shifted(-1);
        for (const auto& iv : isolate(pw, M->to_mpq(), bits).intervals)
          if (iv.hi() >= s && iv.lo() <= t) c = min(max(iv.midpoint(), s), t);
        constant(s, c, *M, eta + cost);
        copy(c, t, eta + cost);
      }
      M = pt;
    };

    std::vector<DyadicInterval> crit;
    if (p.degree() >= 2) crit = isolate_roots(poly::derivative(pw.coeffs), DyadicInterval::unit(), bits);
    Dyadic pos(-1);
    for (const auto& iv : crit) {
      if (pos < iv.lo()) monotone(pos, iv.lo());
      Dyadic s = max(pos, iv.lo()), t = iv.hi();
      if (s < t) {
        Dyadic c = max(*M, pw.eval(s));
        Dyadic e = max(eta, cost);
        constant(s, t, c, e);
        eta = e;
        M = max(c, pw.eval(t));
      }
      pos = max(pos, t);
    }
    if (pos < Dyadic(1)) monotone(pos, Dyadic(1));
  }
  return PPoly(std::move(out));
}

/// f ∘ g. The whole enclosure of g must map into the domain of f.
inline PPoly pp_compose(const PPoly& f, const PPoly& g, std::int64_t n) {
  for (const auto& gp : g.pieces) {
    ChebEnclosure gc = gp.p.center();
    ChebEnclosure above = ChebEnclosure(f.hi() - gp.err()) - gc, below = gc - ChebEnclosure(f.lo() + gp.err());
    if (!certify_nonnegative(to_power_basis(above).coeffs, DyadicInterval::unit()) ||
        !certify_nonnegative(to_power_basis(below).coeffs, DyadicInterval::unit()))
      throw Error(Errc::RangeViolation, "inner function leaves the domain of the outer one");
  }
  Dyadic lip_f = pp_lipschitz(f), jump = pp_max_jump(f);
  std::vector<Piece> out;
  for (const auto& gp : g.pieces) {
    ChebEnclosure gc = gp.p.center();
    Dyadic eg = gp.err();
    Dyadic prop = eg.is_zero() ? Dyadic() : lip_f * eg + jump;

    // Constant on the points of I: hull of f over the range of g there.
    auto hull_piece = [&](const Dyadic& u0, const Dyadic& u1) {
      std::int64_t hb = n + 8 + detail::lip_bits(lip_f);
      Ball r = cheb_eval(gc, Ball::from_interval(u0, u1), hb).widened(eg);
      r = Ball::from_interval(max(r.lo(), f.lo()), min(r.hi(), f.hi()));
      Ball v = pp_eval(f, r, hb);
      out.push_back(detail::constant_piece(gp.x_at(u0), gp.x_at(u1), v.center(), v.radius()));
    };
    if (gc.degree() == 0) {
      hull_piece(Dyadic(-1), Dyadic(1));
      continue;
    }

    PowerPolyInt pw = to_power_basis(gc);
    Dyadic lg = detail::local_lipschitz(gc);
    std::int64_t bits = n + 4 + detail::lip_bits(lip_f * lg);
    std::vector<DyadicInterval> cross;
    for (std::size_t j = 1; j < f.size(); ++j)
      for (const auto& iv : isolate(pw, f.pieces[j].a.to_mpq(), bits).intervals) cross.push_back(iv);
    std::sort(cross.begin(), cross.end(), [](const auto& x, const auto& y) { return x.lo() < y.lo(); });

    // Between crossings g stays inside one piece of f, rescaled to that piece's local axis.
    auto segment = [&](const Dyadic& s, const Dyadic& t) {
      const Piece& fp = f.pieces[f.locate(pw.eval((s + t).shifted(-1)))];
      ChebEnclosure gseg = cheb_affine(gc, (t - s).shifted(-1), (s + t).shifted(-1));
      Dyadic h = fp.half(), lf = detail::local_lipschitz(fp.p), scale, loss;
      if (detail::is_pow2(h)) {
        scale = Dyadic::pow2(-h.exponent());
      } else {
        std::int64_t w = n + 6 + detail::lip_bits(lf);
        scale = div_floor(Dyadic(1), h, w + std::max<std::int64_t>(0, -h.floor_log2()));
        loss = lf * (Dyadic(1) - scale * h);
      }
      ChebEnclosure inner = cheb_scale(gseg - ChebEnclosure(fp.mid()), scale);
      ChebEnclosure r = cheb_compose(fp.p.center(), inner, n + 4);
      r.err = (r.err + fp.err() + loss + prop).round_up_magnitude();
      out.push_back(Piece{gp.x_at(s), gp.x_at(t), r});
    };

    Dyadic pos(-1);
    std::optional<DyadicInterval> run;  // overlapping crossings are merged
    auto flush = [&] {
      if (!run) return;
      Dyadic lo = max(run->lo(), pos), hi = min(run->hi(), Dyadic(1));
      if (pos < lo) segment(pos, lo);
      if (lo < hi) hull_piece(lo, hi);
      pos = max(pos, hi);
      run.reset();
    };
    for (const auto& iv : cross) {
      if (run && iv.lo() <= run->hi())
        run = DyadicInterval(run->lo(), max(run->hi(), iv.hi()));
      else {
        flush();
        run = iv;
      }
    }
    flush();
    if (pos < Dyadic(1)) segment(pos, Dyadic(1));
  }
  return PPoly(std::move(out));
}

namespace detail {

// √y for y = 5/8 + 3u/8 ∈ [1/4, 1], in u, within 2^-m. Newton on the inverse square root,
// z ← z + zρ/2 with ρ = 1 − y·z². Then y·z = √y·√(1 − ρ), which is within |ρ| of √y.
inline ChebEnclosure sqrt_base(std::int64_t m) {
  ChebEnclosure y = ChebEnclosure::from_coeffs({Dyadic(mpz_class(5), -3), Dyadic(mpz_class(3), -3)});
  ChebEnclosure z = ChebEnclosure::from_coeffs({Dyadic(mpz_class(3), -1), Dyadic(mpz_class(-1), -1)});
  for (int it = 0; it < 64; ++it) {
    ChebEnclosure rho = ChebEnclosure(Dyadic(1)) - y * (z * z);
    Dyadic r = l1_norm(rho);
    if (r <= Dyadic::pow2(-m - 3)) {
      // y·z² = 1 − ρ > 0, so z has no zero and takes the sign of z(0).
      if (to_power_basis(z).eval(Dyadic()).sign() <= 0) break;
      ChebEnclosure s = size_reduce(y * z, m + 2);
      s.err = (s.err + r).round_up_magnitude();
      return s;
    }
    z = size_reduce(z + cheb_scale(z * rho, Dyadic(mpz_class(1), -1)), m + 6).center();
  }
  throw Error(Errc::Timeout, "square root iteration did not converge");
}

// √|y| on [-1, 1] within 2^-m: scaled copies of the base on [4^-(k+1), 4^-k], mirrored for
// negative y, and a flat piece around 0.
inline PPoly sqrt_table(std::int64_t m) {
  ChebEnclosure base = sqrt_base(m);
  ChebEnclosure mirrored = base;
  for (auto& [k, c] : mirrored.coeffs)
    if (k % 2) c = -c;
  std::int64_t K = m + 1;
  std::vector<Piece> ps;
  for (std::int64_t k = 0; k < K; ++k)
    ps.push_back(Piece{-Dyadic::pow2(-2 * k), -Dyadic::pow2(-2 * k - 2), cheb_scale(mirrored, Dyadic::pow2(-k))});
  ps.push_back(constant_piece(-Dyadic::pow2(-2 * K), Dyadic::pow2(-2 * K), Dyadic::pow2(-K - 1), Dyadic::pow2(-K - 1)));
  for (std::int64_t k = K - 1; k >= 0; --k)
    ps.push_back(Piece{Dyadic::pow2(-2 * k - 2), Dyadic::pow2(-2 * k), cheb_scale(base, Dyadic::pow2(-k))});
  return PPoly(std::move(ps));
}

}  // namespace detail

/// √|f| within 2^-n plus √err per piece (|√|a| − √|b|| ≤ √|a − b|).
inline PPoly pp_sqrt_abs(const PPoly& f, std::int64_t n) {
  Dyadic B;
  for (const auto& pc : f.pieces) B = max(B, l1_norm(pc.p));
  std::int64_t J = B <= Dyadic(1) ? 0 : (B.ceil_log2() + 1) / 2;  // 4^J ≥ B
  std::int64_t m = n + J + 2;
  PPoly table = detail::sqrt_table(m);
  std::vector<Piece> out;
  for (const auto& pc : f.pieces) {
    Piece scaled{pc.a, pc.b, cheb_scale(pc.p.center(), Dyadic::pow2(-2 * J))};
    PPoly r = pp_compose(table, PPoly({scaled}), m);
    Dyadic extra = detail::sqrt_up(pc.err());
    for (auto& q : r.pieces) {
      q.p = cheb_scale(q.p, Dyadic::pow2(J));
      q.p.err = (q.p.err + extra).round_up_magnitude();
      out.push_back(std::move(q));
    }
  }
  return PPoly(std::move(out));
}

}  // namespace fnreps
