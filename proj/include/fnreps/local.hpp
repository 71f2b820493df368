#pragma once

// Local names: for each dyadic subinterval D a polynomial or piecewise polynomial name of f on D.

#include <functional>
#include <queue>

#include "fnreps/ppoly.hpp"

namespace fnreps {

struct LocalName {
  enum class Kind { LPoly, LPPoly };
  Kind kind = Kind::LPPoly;
  /// Name of f on D within 2^-n. For LPoly the result has a single piece.
  std::function<PPoly(const DyadicInterval&, std::int64_t)> localize;
};

namespace detail {

// Endpoints of k near-equal segments of [-1,1], rounded to a dyadic grid fine enough that
// no segment collapses.
inline std::vector<Dyadic> equidistant(std::int64_t k) {
  k = std::max<std::int64_t>(k, 1);
  std::int64_t grid = Dyadic(k).ceil_log2() + 3;
  std::vector<Dyadic> pts{Dyadic(-1)};
  for (std::int64_t i = 1; i < k; ++i) pts.push_back(div_floor(Dyadic(2 * i - k), Dyadic(k), grid));
  pts.push_back(Dyadic(1));
  return pts;
}

}  // namespace detail

/// Sum of per-segment integrals over n equal segments, each localized at n + ⌈log₂ n⌉ + 2.
inline Ball local_integrate(const LocalName& f, std::int64_t n) {
  std::int64_t k = std::max<std::int64_t>(n, 1);
  std::int64_t acc = n + Dyadic(k).ceil_log2() + 2;
  auto pts = detail::equidistant(k);
  Ball total;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    PPoly p = f.localize(DyadicInterval(pts[i], pts[i + 1]), acc);
    total += pp_integrate(p, Ball(pts[i]), Ball(pts[i + 1]), acc);
  }
  return total.rounded(n + 2);
}

/// Branch and bound over subdomains, starting from the integration partition. A segment at
/// depth d is localized at accuracy n + 2 + d; bisection stops at depth n + 8.
inline Ball local_range_max(const LocalName& f, std::int64_t n) {
  struct Box {
    Dyadic lo, hi;
    std::int64_t depth;
    Ball range;
  };
  auto order = [](const Box& a, const Box& b) {
    if (a.range.hi() != b.range.hi()) return a.range.hi() < b.range.hi();
    return b.lo < a.lo;
  };
  std::priority_queue<Box, std::vector<Box>, decltype(order)> queue(order);
  Dyadic best;
  bool have_best = false;
  auto push = [&](const Dyadic& lo, const Dyadic& hi, std::int64_t depth) {
    std::int64_t acc = n + 2 + depth;
    PPoly p = f.localize(DyadicInterval(lo, hi), acc);
    Ball r = pp_range_max(p, Ball(lo), Ball(hi), acc);
    if (!have_best || r.lo() > best) {
      best = r.lo();
      have_best = true;
    }
    queue.push(Box{lo, hi, depth, r});
  };
  auto pts = detail::equidistant(std::max<std::int64_t>(n, 1));
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) push(pts[i], pts[i + 1], 0);
  Dyadic tol = Dyadic::pow2(-n);
  for (;;) {
    Box top = queue.top();
    if (top.range.hi() - best <= tol) return Ball::from_interval(min(best, top.range.hi()), top.range.hi());
    queue.pop();
    if (top.depth >= n + 8) throw Error(Errc::Timeout, "local maximisation reached its depth cap");
    Dyadic mid = (top.lo + top.hi).shifted(-1);
    push(top.lo, mid, top.depth + 1);
    push(mid, top.hi, top.depth + 1);
  }
}

}  // namespace fnreps
