#pragma once

// Bounded division: 1/P for piecewise polynomials with P ≥ 1, by Newton–Raphson
// iteration Q ← 2Q − P·Q² started from a piecewise linear interpolant of 1/P.

#include <algorithm>
#include <vector>

#include "fnreps/ppoly.hpp"

namespace fnreps {

/// What one division run did, for inspection and tests.
struct DivisionTrace {
  struct Segment {
    int p_degree = 0;
    int q0_degree = 0;
    std::vector<int> pre_sweep_degrees;  // degree of each iterate before size reduction
  };
  int planned_iterations = 0;  // ⌈log₂(3n)⌉ + 1
  int extra_iterations = 0;    // only if the final certificate failed
  std::int64_t max_r = 0;
  std::vector<std::pair<Dyadic, Dyadic>> q0_nodes;  // (x, y) of Q₀ on the original axis
  std::vector<Segment> segments;
};

struct DivideOptions {
  // When false, iterates keep every term and only their mantissas are shortened,
  // so degrees follow the exact recurrence.
  bool size_reduction = true;
  DivisionTrace* trace = nullptr;
};

/// Newton step count for accuracy n.
inline int division_iterations(std::int64_t n) {
  return static_cast<int>(Dyadic(3 * std::max<std::int64_t>(n, 1)).ceil_log2()) + 1;
}

namespace detail {

// Builds P − c as an integer polynomial with the same sign as P − c.
inline IntPoly shifted_int_poly(const ChebEnclosure& p, const Dyadic& c) {
  auto a = to_power_basis(p).to_dyadics();
  a[0] -= c;
  return PowerPolyInt::from_dyadics(a).coeffs;
}

// Isolating intervals for P' = 0, P = 2^k (0 ≤ k ≤ r), P = 2^(k+2)/3 (0 ≤ k < r) on [-1,1],
// merged with the boundary points. Every merged interval has diameter ≤ 2^-iso.
inline std::vector<DyadicInterval> division_nodes(const PowerPolyInt& pw, std::int64_t r, std::int64_t iso) {
  Dyadic diam = Dyadic::pow2(-iso);
  for (std::int64_t extra = 1;; extra += 2) {
    std::int64_t bits = iso + extra;
    std::vector<DyadicInterval> all{DyadicInterval(Dyadic(-1), Dyadic(-1)), DyadicInterval(Dyadic(1), Dyadic(1))};
    for (const auto& iv : isolate_roots(poly::derivative(pw.coeffs), DyadicInterval::unit(), bits)) all.push_back(iv);
    for (std::int64_t k = 0; k <= r; ++k) {
      mpz_class pk;
      mpz_ui_pow_ui(pk.get_mpz_t(), 2, static_cast<unsigned long>(k));
      for (const auto& iv : isolate(pw, mpq_class(pk), bits).intervals) all.push_back(iv);
      if (k < r) {
        for (const auto& iv : isolate(pw, mpq_class(pk * 4, 3), bits).intervals) all.push_back(iv);
      }
    }
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.lo() < y.lo(); });
    std::vector<DyadicInterval> merged;
    bool ok = true;
    for (const auto& iv : all) {
      if (!merged.empty() && iv.lo() <= merged.back().hi()) {
        DyadicInterval u(merged.back().lo(), max(merged.back().hi(), iv.hi()));
        if (u.diameter() > diam) ok = false;
        merged.back() = u;
      } else {
        merged.push_back(iv);
      }
    }
    if (ok) return merged;
    if (extra > 64) throw Error(Errc::Timeout, "division breakpoints could not be separated");
  }
}

// Rounds each coefficient to `sig` significant bits. Nonzero coefficients stay nonzero.
inline ChebEnclosure trim_mantissas(const ChebEnclosure& p, std::int64_t sig) {
  ChebEnclosure r;
  for (const auto& [k, c] : p.coeffs) r.coeffs.emplace(k, c.round_down(sig - 1 - c.abs().floor_log2()));
  return r;
}

inline std::vector<Piece> divide_piece(const Piece& pc, std::int64_t n, const DivideOptions& opt) {
  ChebEnclosure P = pc.p.center();
  Dyadic eP = pc.err();
  Dyadic floor_needed = Dyadic(1) + eP;
  if (!certify_nonnegative(shifted_int_poly(P, floor_needed), DyadicInterval::unit()))
    throw Error(Errc::NotBoundedBelow, "divisor is not certified ≥ 1 on [" + pc.a.str() + ", " + pc.b.str() + "]");

  if (P.degree() == 0) {
    Ball q = recip(Ball(P.coeff(0)), n + 4);
    ChebEnclosure c(q.center());
    // |1/f − 1/c| ≤ eP/(f·c) ≤ eP since f, c ≥ 1.
    c.err = (q.radius() + eP).round_up_magnitude();
    return {Piece{pc.a, pc.b, c}};
  }

  // Lipschitz constant and range bound [1, 2^r] on the local axis.
  Dyadic ell = local_lipschitz(P);
  std::int64_t r = std::max<std::int64_t>(0, l1_norm(P).ceil_log2());
  std::int64_t iso = r + 4 + ell.ceil_log2();
  PowerPolyInt pw = to_power_basis(P);
  auto merged = division_nodes(pw, r, iso);

  // Interpolation nodes; the ends stay at the boundary.
  std::vector<Dyadic> nodes;
  for (const auto& iv : merged) nodes.push_back(iv.midpoint());
  nodes.front() = Dyadic(-1);
  nodes.back() = Dyadic(1);
  std::vector<Dyadic> vals;
  for (const auto& u : nodes) vals.push_back(recip(cheb_eval(P, Ball(u)), r + 10).center().round_nearest(r + 6));

  int N = division_iterations(n);
  if (opt.trace) {
    opt.trace->planned_iterations = N;
    opt.trace->max_r = std::max(opt.trace->max_r, r);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!opt.trace->q0_nodes.empty() && i == 0) continue;  // shared with the previous piece
      opt.trace->q0_nodes.emplace_back(pc.x_at(nodes[i]), vals[i]);
    }
  }

  std::int64_t target = n + 4 + r;
  std::vector<Piece> out;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    Dyadic c = (nodes[i] + nodes[i + 1]).shifted(-1), w = (nodes[i + 1] - nodes[i]).shifted(-1);
    ChebEnclosure Ps = cheb_affine(P, w, c);
    ChebEnclosure Q = ChebEnclosure::from_coeffs({(vals[i] + vals[i + 1]).shifted(-1), (vals[i + 1] - vals[i]).shifted(-1)});
    DivisionTrace::Segment seg{Ps.degree(), Q.degree(), {}};
    auto step = [&] {
      ChebEnclosure next = cheb_scale(Q, Dyadic(2)) - Ps * (Q * Q);
      seg.pre_sweep_degrees.push_back(next.degree());
      Q = opt.size_reduction ? size_reduce(next, target).center() : trim_mantissas(next, target + 16);
      check_deadline();
    };
    for (int k = 0; k < N; ++k) step();
    // |Q − 1/P| = |1 − P·Q| / P ≤ ‖1 − P·Q‖₁ on this segment.
    Dyadic cert;
    for (int extra = 0;; ++extra) {
      cert = l1_norm(ChebEnclosure(Dyadic(1)) - Ps * Q);
      if (cert <= Dyadic::pow2(-n - 1) || extra >= 3) break;
      step();
      if (opt.trace) ++opt.trace->extra_iterations;
    }
    ChebEnclosure out_q = size_reduce(Q, n + 2);
    out_q.err = (out_q.err + cert + eP).round_up_magnitude();
    out.push_back(Piece{pc.x_at(nodes[i]), pc.x_at(nodes[i + 1]), out_q});
    if (opt.trace) opt.trace->segments.push_back(std::move(seg));
  }
  return out;
}

}  // namespace detail

/// 1/P to accuracy 2^-n beyond P's own error, piece by piece.
/// Requires the center of P to be certified ≥ 1 + err(P) on every piece.
inline PPoly pp_divide(const PPoly& P, std::int64_t n, const DivideOptions& opt = {}) {
  std::vector<Piece> out;
  for (const auto& pc : P.pieces)
    for (auto& q : detail::divide_piece(pc, n, opt)) out.push_back(std::move(q));
  return PPoly(std::move(out));
}

}  // namespace fnreps
