#pragma once

// Real numbers as fast-converging Cauchy queries: accuracy n ↦ ball of radius ≤ 2^-n.

#include <functional>
#include <memory>
#include <mutex>
#include <optional>

#include "fnreps/dyadic.hpp"
#include "fnreps/elementary.hpp"

namespace fnreps {

class CauchyReal {
 public:
  using Query = std::function<Ball(std::int64_t)>;

  /// Wraps a raw query. The raw query is asked for increasing internal accuracy until its
  /// answer meets the 2^-n radius contract, so it may undershoot occasionally.
  explicit CauchyReal(Query q) : impl_(std::make_shared<Impl>(std::move(q))) {}

  static CauchyReal from_dyadic(const Dyadic& d) {
    return CauchyReal([d](std::int64_t) { return Ball(d); });
  }

  /// The exact rational num/den (den > 0).
  static CauchyReal from_rational(const mpz_class& num, const mpz_class& den) {
    Dyadic a(num, 0), b(den, 0);
    return CauchyReal([a, b](std::int64_t n) {
      return Ball::from_interval(div_floor(a, b, n + 1), div_ceil(a, b, n + 1));
    });
  }

  static CauchyReal pi() {
    return CauchyReal([](std::int64_t n) { return pi_ball(n + 1); });
  }

  /// Ball of radius ≤ 2^-n containing the real.
  Ball query(std::int64_t n) const { return impl_->query(n); }

  friend CauchyReal operator+(const CauchyReal& a, const CauchyReal& b) {
    return CauchyReal([a, b](std::int64_t n) { return (a.query(n + 1) + b.query(n + 1)).rounded(n + 3); });
  }
  friend CauchyReal operator-(const CauchyReal& a, const CauchyReal& b) {
    return CauchyReal([a, b](std::int64_t n) { return (a.query(n + 1) - b.query(n + 1)).rounded(n + 3); });
  }
  CauchyReal operator-() const {
    CauchyReal a = *this;
    return CauchyReal([a](std::int64_t n) { return -a.query(n); });
  }
  friend CauchyReal operator*(const CauchyReal& a, const CauchyReal& b) {
    return CauchyReal([a, b](std::int64_t n) {
      // Magnitude probe at accuracy 0 decides how precisely each factor is needed.
      std::int64_t la = a.query(0).mag().is_zero() ? 0 : (a.query(0).mag() + Dyadic(1)).ceil_log2();
      std::int64_t lb = b.query(0).mag().is_zero() ? 0 : (b.query(0).mag() + Dyadic(1)).ceil_log2();
      return (a.query(n + 2 + lb) * b.query(n + 2 + la)).rounded(n + 3);
    });
  }

 private:
  struct Impl {
    explicit Impl(Query q) : raw(std::move(q)) {}

    Ball query(std::int64_t n) {
      {
        std::lock_guard<std::mutex> lock(mu);
        if (best && best_n >= n) return *best;
      }
      Dyadic target = Dyadic::pow2(-n);
      Ball b;
      for (std::int64_t guard = 0;; guard += 4) {
        b = raw(n + guard);
        if (b.radius() <= target) break;
        if (guard > 512) throw Error(Errc::Timeout, "real query failed to converge");
      }
      std::lock_guard<std::mutex> lock(mu);
      if (!best || best_n < n) {
        best = b;
        best_n = n;
      }
      return b;
    }

    Query raw;
    std::mutex mu;
    std::optional<Ball> best;
    std::int64_t best_n = -1;
  };

  std::shared_ptr<Impl> impl_;
};

/// a / b given a trusted lower bound lb ≤ |b| with lb > 0.
inline CauchyReal real_div(const CauchyReal& a, const CauchyReal& b, const Dyadic& lb) {
  if (lb.sign() <= 0) throw Error(Errc::BadWitness, "lower bound must be positive");
  std::int64_t llb = lb.floor_log2();  // 2^llb ≤ lb
  return CauchyReal([a, b, lb, llb](std::int64_t n) {
    Ball a0 = a.query(0);
    std::int64_t la = a0.mag().is_zero() ? 0 : (a0.mag() + Dyadic(1)).ceil_log2();
    // |a/b - ã/b̃| ≤ |a-ã|/|b| + |ã||b-b̃|/(|b||b̃|); both |b|,|b̃| ≥ lb/2 once rad(b̃) ≤ lb/2.
    std::int64_t nb = std::max(n + 3 + la - 2 * llb + 2, -llb + 1);
    std::int64_t na = n + 2 - llb + 1;
    Ball bb = b.query(nb);
    if (bb.mag() < lb) throw Error(Errc::BadWitness, "queried value certifies |b| < lb");
    Ball q = a.query(na) * recip(bb, n + 4 + la - llb);
    return q.rounded(n + 3);
  });
}

/// Limit of a sequence with convergence modulus p: ‖seq(k) − x‖ < 2^-(n+1) for k ≥ p(n).
inline CauchyReal real_limit(std::function<CauchyReal(std::int64_t)> seq,
                             std::function<std::int64_t(std::int64_t)> p) {
  return CauchyReal([seq = std::move(seq), p = std::move(p)](std::int64_t n) {
    Ball b = seq(p(n + 1)).query(n + 1);
    return b.widened(Dyadic::pow2(-n - 1));
  });
}

}  // namespace fnreps
