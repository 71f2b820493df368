#pragma once

// Exact dyadic rationals m·2^e, exact-endpoint intervals, and outward-rounded balls.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>

#include "fnreps/error.hpp"

namespace fnreps {

/// Significant bits kept in ball radii; truncation always rounds up.
inline constexpr int kRadiusBits = 64;

class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(int v) : m_(v) { normalize(); }
  Dyadic(long v) : m_(v) { normalize(); }
  Dyadic(long long v) : m_(static_cast<long>(v)) { normalize(); }
  Dyadic(mpz_class m, std::int64_t e) : m_(std::move(m)), e_(e) { normalize(); }

  static Dyadic pow2(std::int64_t e) { return Dyadic(mpz_class(1), e); }

  /// Exact conversion; throws on non-finite input.
  static Dyadic from_double(double d) {
    if (!std::isfinite(d)) throw Error(Errc::DomainViolation, "non-finite double");
    if (d == 0.0) return {};
    int exp = 0;
    double frac = std::frexp(d, &exp);
    auto m = static_cast<long long>(std::ldexp(frac, 53));
    return Dyadic(mpz_class(static_cast<long>(m)), exp - 53);
  }

  const mpz_class& mantissa() const { return m_; }
  std::int64_t exponent() const { return e_; }

  int sign() const { return sgn(m_); }
  bool is_zero() const { return m_ == 0; }

  Dyadic operator-() const {
    Dyadic r = *this;
    r.m_ = -r.m_;
    return r;
  }
  Dyadic abs() const { return sign() < 0 ? -*this : *this; }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.e_ == b.e_) return Dyadic(mpz_class(a.m_ + b.m_), a.e_);
    const Dyadic& lo = a.e_ < b.e_ ? a : b;
    const Dyadic& hi = a.e_ < b.e_ ? b : a;
    mpz_class t;
    mpz_mul_2exp(t.get_mpz_t(), hi.m_.get_mpz_t(), static_cast<mp_bitcnt_t>(hi.e_ - lo.e_));
    t += lo.m_;
    return Dyadic(std::move(t), lo.e_);
  }
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero() || b.is_zero()) return {};
    return Dyadic(mpz_class(a.m_ * b.m_), a.e_ + b.e_);
  }
  Dyadic& operator+=(const Dyadic& b) { return *this = *this + b; }
  Dyadic& operator-=(const Dyadic& b) { return *this = *this - b; }
  Dyadic& operator*=(const Dyadic& b) { return *this = *this * b; }

  /// this · 2^k (exact).
  Dyadic shifted(std::int64_t k) const {
    if (is_zero()) return {};
    Dyadic r = *this;
    r.e_ += k;
    return r;
  }

  friend bool operator==(const Dyadic& a, const Dyadic& b) { return a.e_ == b.e_ && a.m_ == b.m_; }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    int sa = a.sign(), sb = b.sign();
    if (sa != sb) return sa <=> sb;
    if (sa == 0) return std::strong_ordering::equal;
    // Same sign: compare magnitudes by bit position first.
    std::int64_t la = a.floor_log2(), lb = b.floor_log2();
    if (la != lb) return sa > 0 ? la <=> lb : lb <=> la;
    int s = (a - b).sign();
    return s <=> 0;
  }

  /// floor(log2 |x|); x must be nonzero.
  std::int64_t floor_log2() const {
    return static_cast<std::int64_t>(mpz_sizeinbase(m_.get_mpz_t(), 2)) - 1 + e_;
  }
  /// Smallest k with |x| ≤ 2^k; x must be nonzero.
  std::int64_t ceil_log2() const {
    std::int64_t f = floor_log2();
    mpz_class a = ::abs(m_);
    return (a == 1) ? f : f + 1;
  }

  /// Largest multiple of 2^-bits that is ≤ x.
  Dyadic round_down(std::int64_t bits) const { return round_grid(bits, -1); }
  /// Smallest multiple of 2^-bits that is ≥ x.
  Dyadic round_up(std::int64_t bits) const { return round_grid(bits, +1); }
  /// Nearest multiple of 2^-bits (ties toward +inf).
  Dyadic round_nearest(std::int64_t bits) const {
    return (*this + pow2(-bits - 1)).round_down(bits);
  }

  /// Keeps at most `sig` significant bits, rounding the magnitude up.
  Dyadic round_up_magnitude(int sig = kRadiusBits) const {
    if (is_zero()) return {};
    auto len = static_cast<std::int64_t>(mpz_sizeinbase(m_.get_mpz_t(), 2));
    if (len <= sig) return *this;
    std::int64_t drop = len - sig;
    mpz_class a = ::abs(m_), q;
    mpz_cdiv_q_2exp(q.get_mpz_t(), a.get_mpz_t(), static_cast<mp_bitcnt_t>(drop));
    if (sign() < 0) q = -q;
    return Dyadic(std::move(q), e_ + drop);
  }

  std::size_t mantissa_bits() const { return mpz_sizeinbase(m_.get_mpz_t(), 2); }

  double to_double() const {
    if (is_zero()) return 0.0;
    long exp = 0;
    double d = mpz_get_d_2exp(&exp, m_.get_mpz_t());
    return std::ldexp(d, static_cast<int>(std::clamp<std::int64_t>(exp + e_, -100000, 100000)));
  }

  mpq_class to_mpq() const {
    mpq_class q(m_);
    if (e_ >= 0)
      mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e_));
    else
      mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e_));
    return q;
  }

  /// Debug form "m*2^e".
  std::string str() const { return m_.get_str() + "*2^" + std::to_string(e_); }

  /// Decimal with `digits` fractional digits, rounded to nearest.
  std::string decimal(int digits) const {
    mpq_class q = to_mpq();
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    q *= scale;
    mpz_class n = q.get_num() * 2 + q.get_den(), d = q.get_den() * 2, v;
    mpz_fdiv_q(v.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    bool neg = v < 0;
    if (neg) v = -v;
    std::string s = v.get_str();
    if (digits > 0) {
      if (static_cast<int>(s.size()) <= digits) s.insert(0, static_cast<std::size_t>(digits) - s.size() + 1, '0');
      s.insert(s.size() - static_cast<std::size_t>(digits), ".");
    }
    return (neg ? "-" : "") + s;
  }

 private:
  Dyadic round_grid(std::int64_t bits, int dir) const {
    if (is_zero() || e_ >= -bits) return *this;
    auto drop = static_cast<mp_bitcnt_t>(-bits - e_);
    mpz_class q;
    if (dir < 0)
      mpz_fdiv_q_2exp(q.get_mpz_t(), m_.get_mpz_t(), drop);
    else
      mpz_cdiv_q_2exp(q.get_mpz_t(), m_.get_mpz_t(), drop);
    return Dyadic(std::move(q), -bits);
  }

  void normalize() {
    if (m_ == 0) {
      e_ = 0;
      return;
    }
    auto tz = mpz_scan1(m_.get_mpz_t(), 0);
    if (tz > 0) {
      mpz_fdiv_q_2exp(m_.get_mpz_t(), m_.get_mpz_t(), tz);
      e_ += static_cast<std::int64_t>(tz);
    }
  }

  mpz_class m_;
  std::int64_t e_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const Dyadic& d) { return os << d.str(); }

inline Dyadic min(const Dyadic& a, const Dyadic& b) { return b < a ? b : a; }
inline Dyadic max(const Dyadic& a, const Dyadic& b) { return a < b ? b : a; }

/// floor(a/b · 2^bits) · 2^-bits, exact integer division.
inline Dyadic div_floor(const Dyadic& a, const Dyadic& b, std::int64_t bits) {
  if (b.is_zero()) throw Error(Errc::DivisionByZeroPossible, "dyadic division by zero");
  std::int64_t s = a.exponent() - b.exponent() + bits;
  mpz_class num = a.mantissa(), den = b.mantissa(), q;
  if (s >= 0)
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(s));
  else
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(-s));
  if (den < 0) {
    den = -den;
    num = -num;
  }
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return Dyadic(std::move(q), -bits);
}

inline Dyadic div_ceil(const Dyadic& a, const Dyadic& b, std::int64_t bits) {
  return -div_floor(-a, b, bits);
}

/// Closed interval with dyadic endpoints, lo ≤ hi.
class DyadicInterval {
 public:
  DyadicInterval() = default;
  DyadicInterval(Dyadic lo, Dyadic hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (hi_ < lo_) throw Error(Errc::DomainViolation, "interval with lo > hi");
  }
  static DyadicInterval unit() { return {Dyadic(-1), Dyadic(1)}; }

  const Dyadic& lo() const { return lo_; }
  const Dyadic& hi() const { return hi_; }
  Dyadic diameter() const { return hi_ - lo_; }
  Dyadic midpoint() const { return (lo_ + hi_).shifted(-1); }
  bool contains(const Dyadic& x) const { return lo_ <= x && x <= hi_; }
  bool contains(const DyadicInterval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool intersects(const DyadicInterval& o) const { return !(o.hi_ < lo_ || hi_ < o.lo_); }
  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;

 private:
  Dyadic lo_{-1}, hi_{1};
};

inline std::ostream& operator<<(std::ostream& os, const DyadicInterval& i) {
  return os << "[" << i.lo() << ", " << i.hi() << "]";
}

/// center ± radius with radius ≥ 0; operations are inclusion-isotone.
class Ball {
 public:
  Ball() = default;
  Ball(int v) : c_(v) {}
  Ball(Dyadic c) : c_(std::move(c)) {}
  Ball(Dyadic c, const Dyadic& r) : c_(std::move(c)), r_(r.round_up_magnitude()) {
    if (r_.sign() < 0) throw Error(Errc::DomainViolation, "negative ball radius");
  }

  static Ball from_interval(const Dyadic& lo, const Dyadic& hi) {
    return Ball((lo + hi).shifted(-1), (hi - lo).shifted(-1));
  }
  static Ball from_interval(const DyadicInterval& i) { return from_interval(i.lo(), i.hi()); }

  const Dyadic& center() const { return c_; }
  const Dyadic& radius() const { return r_; }
  Dyadic lo() const { return c_ - r_; }
  Dyadic hi() const { return c_ + r_; }
  DyadicInterval interval() const { return {lo(), hi()}; }
  bool is_exact() const { return r_.is_zero(); }

  /// Upper bound on |x| for x in the ball.
  Dyadic mag() const { return (c_.abs().round_up_magnitude() + r_).round_up_magnitude(); }
  /// Lower bound on |x| (0 if the ball straddles 0).
  Dyadic mig() const {
    Dyadic m = c_.abs() - r_;
    return m.sign() > 0 ? m : Dyadic();
  }

  bool contains(const Dyadic& x) const { return (x - c_).abs() <= r_; }
  bool contains(const mpq_class& x) const {
    mpq_class d = x - c_.to_mpq();
    return ::abs(d) <= r_.to_mpq();
  }
  bool contains(const Ball& b) const { return lo() <= b.lo() && b.hi() <= hi(); }
  bool intersects(const Ball& b) const { return !(b.hi() < lo() || hi() < b.lo()); }

  friend bool operator==(const Ball& a, const Ball& b) { return a.c_ == b.c_ && a.r_ == b.r_; }

  Ball operator-() const {
    Ball b = *this;
    b.c_ = -b.c_;
    return b;
  }
  friend Ball operator+(const Ball& a, const Ball& b) { return Ball(a.c_ + b.c_, a.r_ + b.r_); }
  friend Ball operator-(const Ball& a, const Ball& b) { return Ball(a.c_ - b.c_, a.r_ + b.r_); }
  friend Ball operator*(const Ball& a, const Ball& b) {
    Dyadic r = a.c_.abs().round_up_magnitude() * b.r_ + b.c_.abs().round_up_magnitude() * a.r_ + a.r_ * b.r_;
    return Ball(a.c_ * b.c_, r);
  }
  Ball& operator+=(const Ball& b) { return *this = *this + b; }
  Ball& operator-=(const Ball& b) { return *this = *this - b; }
  Ball& operator*=(const Ball& b) { return *this = *this * b; }

  Ball shifted(std::int64_t k) const { return Ball(c_.shifted(k), r_.shifted(k)); }
  Ball widened(const Dyadic& extra) const { return Ball(c_, r_ + extra.abs()); }

  /// Moves the center to the nearest multiple of 2^-bits, growing the radius to compensate.
  Ball rounded(std::int64_t bits) const {
    if (c_.is_zero() || c_.exponent() >= -bits) return *this;
    Dyadic nc = c_.round_nearest(bits);
    return Ball(nc, r_ + (c_ - nc).abs());
  }

  /// Smallest ball containing both.
  Ball hull(const Ball& b) const { return from_interval(min(lo(), b.lo()), max(hi(), b.hi())); }
  /// Intersection; caller guarantees the balls intersect.
  Ball intersect(const Ball& b) const {
    Dyadic l = max(lo(), b.lo()), h = min(hi(), b.hi());
    if (h < l) throw Error(Errc::DomainViolation, "intersect of disjoint balls");
    return from_interval(l, h);
  }

  /// Division by a positive integer, result centered on the 2^-bits grid.
  Ball div_int(unsigned long k, std::int64_t bits) const {
    Dyadic kd(static_cast<long>(k));
    Dyadic c = div_floor(c_, kd, bits);
    Dyadic r = div_ceil(r_, kd, bits) + Dyadic::pow2(-bits);
    return Ball(c, r);
  }

  std::string str() const { return c_.str() + " ± " + r_.str(); }

 private:
  Dyadic c_;
  Dyadic r_;
};

inline std::ostream& operator<<(std::ostream& os, const Ball& b) { return os << b.str(); }

/// Max of two balls in the order-theoretic sense: [max lo, max hi].
inline Ball ball_max(const Ball& a, const Ball& b) {
  return Ball::from_interval(max(a.lo(), b.lo()), max(a.hi(), b.hi()));
}

/// Rounds `a` to the 2^-n grid; the result has radius ≤ 2^-n and contains a.
inline Ball round_to(const Dyadic& a, std::int64_t n) {
  Dyadic c = a.round_nearest(n);
  return Ball(c, (a - c).abs());
}

/// Reciprocal with endpoints rounded outward on the 2^-bits grid.
inline Ball recip(const Ball& a, std::int64_t bits) {
  Dyadic lo = a.lo(), hi = a.hi();
  if (lo.sign() <= 0 && hi.sign() >= 0)
    throw Error(Errc::DivisionByZeroPossible, "reciprocal of a ball containing 0");
  // 1/x is decreasing on either side of 0.
  Dyadic one(1);
  return Ball::from_interval(div_floor(one, hi, bits), div_ceil(one, lo, bits));
}

/// Reciprocal keeping about kRadiusBits bits relative to the smallest result magnitude.
inline Ball recip(const Ball& a) {
  Dyadic lo = a.lo(), hi = a.hi();
  if (lo.sign() <= 0 && hi.sign() >= 0)
    throw Error(Errc::DivisionByZeroPossible, "reciprocal of a ball containing 0");
  std::int64_t big = std::max(lo.abs().ceil_log2(), hi.abs().ceil_log2());
  return recip(a, kRadiusBits + big);
}

inline Ball divide(const Ball& a, const Ball& b, std::int64_t bits) {
  return (a * recip(b, bits + 2 + std::max<std::int64_t>(0, a.mag().is_zero() ? 0 : a.mag().ceil_log2())))
      .rounded(bits + 2);
}

}  // namespace fnreps
