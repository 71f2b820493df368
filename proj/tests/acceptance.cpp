// Acceptance checks. Prints one PASS/FAIL line per criterion; pass criterion numbers as
// arguments to run a subset. Exit status is nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "fnreps/bench.hpp"
#include "fnreps/ppoly_divide.hpp"
#include "fnreps/witness.hpp"
#include "pp_oracle.hpp"
#include "sturm_oracle.hpp"

using namespace fnreps;
using oracle::Mp;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  int failures = 0;

  void fail(const std::string& what) {
    pass = false;
    if (++failures <= 5) detail << "\n    - " << what;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// ---------------------------------------------------------------------------------------
// Oracle functions written independently of the expression parser, in double and MPFR.

double S(double x) { return std::sin(x); }
double C(double x) { return std::cos(x); }
double M(double a, double b) { return std::max(a, b); }
Mp S(const Mp& x) { return oracle::sin(x); }
Mp C(const Mp& x) { return oracle::cos(x); }
Mp M(const Mp& a, const Mp& b) { return oracle::max(a, b); }
template <class T>
T PI() {
  if constexpr (std::is_same_v<T, double>) return M_PI;
  else return oracle::pi();
}

struct OracleFn {
  std::string id;
  std::function<double(double)> d;
  std::function<Mp(const Mp&)> mp;
  std::function<Mp(const Mp&)> kink;  // zeros are the points where f is not smooth
};

template <class F>
OracleFn make_fn(std::string id, F f) {
  return {std::move(id), [f](double x) { return f(x); }, [f](const Mp& x) { return f(x); }, {}};
}

template <class F, class K>
OracleFn make_fn(std::string id, F f, K k) {
  OracleFn o = make_fn(std::move(id), f);
  o.kink = [k](const Mp& x) { return k(x); };
  return o;
}

template <class T>
T sin_quot(const T& x) {
  T s7 = S(T(7.0) * x);
  return (S(T(10.0) * x) + C(T(7.0) * PI<T>() * x)) / (T(10.0) * s7 * s7 + T(1.0));
}

std::map<std::string, OracleFn> oracle_fns() {
  std::vector<OracleFn> v{
      make_fn("sin10x+cos20x", [](auto x) { using T = decltype(x); return S(T(10.0) * x) + C(T(20.0) * x); }),
      make_fn("sin10x+cos7pix", [](auto x) { using T = decltype(x); return S(T(10.0) * x) + C(T(7.0) * PI<T>() * x); }),
      make_fn("nested-sin",
              [](auto x) {
                using T = decltype(x);
                return S(T(10.0) * x + S(T(7.0) * PI<T>() * x * x)) + C(T(10.0) * x);
              }),
      make_fn("runge",
              [](auto x) {
                using T = decltype(x);
                return (S(T(10.0) * x) + C(T(7.0) * PI<T>() * x)) / (T(100.0) * x * x + T(1.0));
              }),
      make_fn("sin-denominator", [](auto x) { return sin_quot(x); }),
      make_fn(
          "max-sin-cos", [](auto x) { using T = decltype(x); return M(S(T(10.0) * x), C(T(11.0) * x)); },
          [](const Mp& x) { return S(Mp(10.0) * x) - C(Mp(11.0) * x); }),
      make_fn(
          "max-parabola-quotient", [](auto x) { using T = decltype(x); return M(x * x / T(2.0), sin_quot(x)); },
          [](const Mp& x) { return x * x / Mp(2.0) - sin_quot(x); }),
      make_fn("one", [](auto x) { using T = decltype(x); return T(1.0) + x * T(0.0); }),
      make_fn("x", [](auto x) { return x; }),
      make_fn("x2", [](auto x) { return x * x; }),
      make_fn(
          "abs", [](auto x) { return M(x, -x); }, [](const Mp& x) { return x; }),
  };
  std::map<std::string, OracleFn> m;
  for (auto& f : v) m.emplace(f.id, std::move(f));
  return m;
}

// Points in (-1,1) where `kink` changes sign, located by bisection.
std::vector<Mp> kink_points(const OracleFn& f) {
  std::vector<Mp> out;
  if (!f.kink) return out;
  const int N = 20000;
  Mp prev_x(-1.0), prev = f.kink(prev_x);
  for (int i = 1; i <= N; ++i) {
    Mp x(mpq_class(2 * i - N, N));
    Mp v = f.kink(x);
    if (mpfr_sgn(v.get()) == 0) {
      out.push_back(x);
    } else if (mpfr_sgn(prev.get()) * mpfr_sgn(v.get()) < 0) {
      Mp a = prev_x, b = x;
      for (int it = 0; it < 200; ++it) {
        Mp m = (a + b) / Mp(2.0);
        if (mpfr_sgn(f.kink(m).get()) * mpfr_sgn(f.kink(a).get()) <= 0) b = m;
        else a = m;
      }
      out.push_back((a + b) / Mp(2.0));
    }
    prev_x = x;
    prev = v;
  }
  return out;
}

// Composite Simpson with about 10^5 points in total, split at the kinks.
Mp oracle_integral(const OracleFn& f) {
  std::vector<Mp> cuts{Mp(-1.0)};
  for (auto& k : kink_points(f)) cuts.push_back(k);
  cuts.push_back(Mp(1.0));
  Mp total(0.0);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double len = (cuts[i + 1] - cuts[i]).to_double();
    long panels = std::max<long>(8, static_cast<long>(50000 * len / 2));
    total = total + oracle::simpson(f.mp, cuts[i], cuts[i + 1], panels);
  }
  return total;
}

// 10^6-point grid in double, then golden-section polish of every near-best local maximum.
Mp oracle_max(const OracleFn& f) {
  const int N = 1000000;
  std::vector<double> v(N + 1);
  double best = -1e300;
  for (int i = 0; i <= N; ++i) {
    v[i] = f.d(-1.0 + 2.0 * i / N);
    best = std::max(best, v[i]);
  }
  Mp result = oracle::max(f.mp(Mp(-1.0)), f.mp(Mp(1.0)));
  for (int i = 1; i < N; ++i) {
    if (v[i] < v[i - 1] || v[i] < v[i + 1] || v[i] < best - 1e-3) continue;
    Mp a(mpq_class(2 * (i - 1) - N, N)), b(mpq_class(2 * (i + 1) - N, N));
    const Mp g((std::sqrt(5.0) - 1) / 2);
    for (int it = 0; it < 90; ++it) {
      Mp c = b - g * (b - a), d = a + g * (b - a);
      if (f.mp(c) < f.mp(d)) a = c;
      else b = d;
    }
    result = oracle::max(result, f.mp((a + b) / Mp(2.0)));
  }
  return result;
}

// ---------------------------------------------------------------------------------------
// 1. Soundness over the benchmark expressions.

Outcome criterion1() {
  Outcome o;
  auto fns = oracle_fns();
  BenchSuite suite = bench_suite("paper-figs");
  CaseLimits limits;
  limits.time = std::chrono::milliseconds(2000);
  int checked = 0, timeouts = 0, unsupported = 0;
  for (const auto& be : suite.exprs) {
    const OracleFn& f = fns.at(be.id);
    Mp truth_int = oracle_integral(f), truth_max = oracle_max(f);
    Expr e = parse(be.text);
    for (Query q : suite.ops) {
      bool completed_at_20 = false;
      for (Strategy s : suite.strategies) {
        for (std::int64_t n : {5, 10, 15, 20}) {
          BenchRecord r;
          try {
            r = run_case(be.id, e, s, q, n, limits);
          } catch (const Error&) {
            ++unsupported;
            break;
          }
          if (r.timeout) {
            ++timeouts;
            break;  // higher accuracy would only take longer
          }
          ++checked;
          if (n == 20) completed_at_20 = true;
          const Mp& truth = q == Query::Max ? truth_max : truth_int;
          if (r.result->radius() > Dyadic::pow2(-n))
            o.fail(be.id + " " + strategy_name(s) + " " + query_name(q) + " n=" + std::to_string(n) + " too wide");
          if (!oracle::contains(*r.result, truth))
            o.fail(be.id + " " + strategy_name(s) + " " + query_name(q) + " n=" + std::to_string(n) + ": " +
                   r.result->center().decimal(12) + " misses " + std::to_string(truth.to_double()));
        }
      }
      if (!completed_at_20) o.fail(be.id + " " + query_name(q) + ": no strategy reached n=20");
    }
  }
  o.detail << " (" << checked << " answers contained; " << timeouts << " timeouts at 2 s and " << unsupported
           << " unsupported combinations excluded)";
  return o;
}

// ---------------------------------------------------------------------------------------
// 2 and 3. Bounded division.

PPoly random_divisor(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> coef(-256, 256);
  ChebEnclosure p;
  for (int j = 1; j <= 6; ++j) p.set(j, Dyadic(mpz_class(coef(rng)), -8));
  p.set(6, Dyadic(mpz_class(coef(rng) | 1), -8));
  p.set(0, Dyadic(1) + l1_norm(p));
  return PPoly::from_cheb(p);
}

std::vector<std::pair<std::string, PPoly>> division_instances() {
  std::vector<std::pair<std::string, PPoly>> v;
  v.emplace_back("x^2+1", PPoly::from_cheb(ChebEnclosure::from_coeffs({Dyadic(mpz_class(3), -1), Dyadic(), Dyadic(mpz_class(1), -1)})));
  v.emplace_back("100x^2+1", PPoly::from_cheb(ChebEnclosure::from_coeffs({Dyadic(51), Dyadic(), Dyadic(50)})));
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 20; ++i) v.emplace_back("random#" + std::to_string(i), random_divisor(rng));
  return v;
}

Outcome criterion2() {
  Outcome o;
  int runs = 0;
  for (const auto& [name, P] : division_instances()) {
    for (std::int64_t n : {5, 10, 20, 30}) {
      ++runs;
      std::string tag = name + " n=" + std::to_string(n);
      PPoly Q = pp_divide(P, n);
      if (Q.error_radius() > Dyadic::pow2(-n)) o.fail(tag + ": error radius above 2^-n");
      mpq_class bound(1);
      mpq_div_2exp(bound.get_mpq_t(), bound.get_mpq_t(), static_cast<mp_bitcnt_t>(n));
      for (int i = 0; i < 1000; ++i) {
        mpq_class x(2 * i - 999, 999);
        x.canonicalize();
        mpq_class err, q = oracle::pp_value(Q, x, &err);
        mpq_class dev = abs(q - 1 / oracle::pp_value(P, x));
        if (dev > err || dev > bound) {
          o.fail(tag + ": |Q - 1/P| = " + std::to_string(dev.get_d()) + " at x=" + x.get_str());
          break;
        }
      }
      // Degrees and iteration count of the unswept run.
      DivisionTrace tr;
      pp_divide(P, n, {false, &tr});
      if (tr.planned_iterations != division_iterations(n) ||
          tr.planned_iterations != static_cast<int>(Dyadic(3 * n).ceil_log2()) + 1)
        o.fail(tag + ": iteration count " + std::to_string(tr.planned_iterations));
      if (tr.extra_iterations != 0) o.fail(tag + ": needed extra iterations");
      for (const auto& seg : tr.segments) {
        if (static_cast<int>(seg.pre_sweep_degrees.size()) != tr.planned_iterations) o.fail(tag + ": iterate count");
        for (int k = 1; k <= static_cast<int>(seg.pre_sweep_degrees.size()); ++k) {
          long expect = ((1L << k) - 1) * seg.p_degree + (1L << k) * seg.q0_degree;
          if (seg.q0_degree != 1 || seg.pre_sweep_degrees[k - 1] != expect)
            o.fail(tag + ": iterate " + std::to_string(k) + " has degree " + std::to_string(seg.pre_sweep_degrees[k - 1]));
        }
      }
    }
  }
  o.detail << " (" << runs << " divisions, 1000 exact points each)";
  return o;
}

Outcome criterion3() {
  Outcome o;
  int pts = 0;
  for (const auto& [name, P] : division_instances()) {
    for (std::int64_t n : {5, 10, 20, 30}) {
      DivisionTrace tr;
      pp_divide(P, n, {true, &tr});
      const auto& nodes = tr.q0_nodes;
      std::size_t seg = 0;
      for (int i = 0; i <= 2000; ++i) {
        mpq_class x(i - 1000, 1000);
        x.canonicalize();
        while (seg + 2 < nodes.size() && x > nodes[seg + 1].first.to_mpq()) ++seg;
        mpq_class a = nodes[seg].first.to_mpq(), b = nodes[seg + 1].first.to_mpq();
        mpq_class t = (x - a) / (b - a);
        mpq_class q0 = nodes[seg].second.to_mpq() * (1 - t) + nodes[seg + 1].second.to_mpq() * t;
        mpq_class px = oracle::pp_value(P, x);
        ++pts;
        if (abs(q0 - 1 / px) > mpq_class(3, 4) / px) {
          o.fail(name + " n=" + std::to_string(n) + " at x=" + x.get_str());
          break;
        }
      }
    }
  }
  o.detail << " (" << pts << " exact samples)";
  return o;
}

// ---------------------------------------------------------------------------------------
// 4. Rational functions through piecewise polynomials.

Outcome criterion4() {
  Outcome o;
  Frac f({Dyadic(1)}, {Dyadic(1), Dyadic(), Dyadic(100)});
  // arctan(10)/5 from MPFR's arctan at 320 bits.
  Mp truth = oracle::atan(Mp(10.0)) / Mp(5.0);
  for (std::int64_t n : {20, 30}) {
    PPoly p = frac_to_ppoly(f, n + 2);
    Ball b = pp_integrate(p, Ball(Dyadic(-1)), Ball(Dyadic(1)), n + 2);
    mpq_class dev = abs(b.center().to_mpq() - truth.to_mpq());
    mpq_class allowed = Dyadic::pow2(-n).to_mpq() + b.radius().to_mpq();
    if (dev > allowed) o.fail("n=" + std::to_string(n) + ": off by " + std::to_string(dev.get_d()));
    if (!oracle::contains(b, truth)) o.fail("n=" + std::to_string(n) + ": ball misses arctan(10)/5");
    o.detail << " n=" << n << ": " << p.size() << " pieces, radius " << decimal_up(b.radius(), 2) << ";";
  }
  return o;
}

// ---------------------------------------------------------------------------------------
// 5. Size lower bounds.

Outcome criterion5() {
  Outcome o;
  for (std::int64_t n = 4; n <= 16; ++n) {
    mpz_class m = paff_min_segments_x2(n), two_n = mpz_class(1) << static_cast<unsigned>(n);
    // Equal m-segment interpolation of x² has error exactly 1/m², so m is minimal iff
    // m² > 2^n ≥ (m−1)².
    if (!(m * m >= two_n)) o.fail("n=" + std::to_string(n) + ": m=" + m.get_str() + " below sqrt(2)^n");
    if (!(m * m > two_n && (m - 1) * (m - 1) <= two_n)) o.fail("n=" + std::to_string(n) + ": m not minimal");
  }
  for (std::int64_t n = 4; n <= 14; ++n) {
    long deg = abs_min_cheb_degree(n);
    mpz_class d2 = mpz_class(deg) * deg, bound = mpz_class(1) << static_cast<unsigned>(n - 2);
    if (!(d2 > bound)) o.fail("n=" + std::to_string(n) + ": degree " + std::to_string(deg) + " not above 2^((n-2)/2)");
    // Independent check of minimality with MPFR: tail 2/(π(2K+1)).
    auto tail = [](long K) { return Mp(2.0) / (oracle::pi() * Mp(static_cast<double>(2 * K + 1))); };
    Mp eps(std::ldexp(1.0, static_cast<int>(-n)));
    if (eps < tail(deg / 2)) o.fail("n=" + std::to_string(n) + ": degree does not reach the bound");
    if (deg >= 2 && !(eps < tail(deg / 2 - 1))) o.fail("n=" + std::to_string(n) + ": smaller degree suffices");
  }
  o.detail << " (x^2 segments m(16)=" << paff_min_segments_x2(16) << ", |x| degree(14)=" << abs_min_cheb_degree(14) << ")";
  return o;
}

// ---------------------------------------------------------------------------------------
// 6. Scaling shape.

double slope(const std::vector<std::pair<double, double>>& pts) {
  double mx = 0, my = 0;
  for (auto& [x, y] : pts) mx += x, my += y;
  mx /= pts.size();
  my /= pts.size();
  double sxy = 0, sxx = 0;
  for (auto& [x, y] : pts) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx);
  return sxy / sxx;
}

double time_integral(const Expr& e, Strategy s, std::int64_t n, int reps, const CaseLimits& limits, bool* timed_out) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = Clock::now();
    BenchRecord rec = run_case("", e, s, Query::Integrate, n, limits);
    double t = seconds_since(t0);
    if (rec.timeout) {
      *timed_out = true;
      return t;
    }
    best = std::min(best, t);
  }
  *timed_out = false;
  return best;
}

Outcome criterion6() {
  Outcome o;
  Expr e = parse("sin(10*x)+cos(7*pi*x)");
  CaseLimits slow;
  slow.time = std::chrono::milliseconds(40000);
  std::vector<std::pair<double, double>> bf;
  std::vector<std::int64_t> bf_timeouts;
  for (std::int64_t n = 6; n <= 14; n += 2) {
    bool to = false;
    double t = time_integral(e, Strategy::BFun, n, 1, slow, &to);
    if (to) {
      for (std::int64_t m = n; m <= 14; m += 2) bf_timeouts.push_back(m);
      break;
    }
    bf.emplace_back(static_cast<double>(n), std::log2(t));
  }
  double bf_slope = bf.size() >= 2 ? slope(bf) : 0;
  if (bf.size() < 2) o.fail("bfun completed fewer than two accuracies");
  if (bf_slope < 0.5) o.fail("bfun slope " + std::to_string(bf_slope));
  // Points beyond the budget must at least be consistent with the fitted growth.
  for (std::int64_t n : bf_timeouts) {
    double predicted = std::exp2(bf.back().second + bf_slope * (n - bf.back().first));
    if (predicted < 40.0 * 0.5) o.fail("bfun timed out at n=" + std::to_string(n) + " although the fit predicts " + std::to_string(predicted) + " s");
  }

  std::vector<std::pair<double, double>> pp;
  double base = 0;
  for (std::int64_t n = 6; n <= 14; n += 2) {
    bool to = false;
    double t = time_integral(e, Strategy::PPoly, n, 7, {}, &to);
    if (to) o.fail("ppoly timed out at n=" + std::to_string(n));
    if (n == 6) base = t;
    pp.emplace_back(static_cast<double>(n), std::log2(t / base));
  }
  double pp_slope = slope(pp);
  if (pp_slope > 0.15) o.fail("ppoly slope " + std::to_string(pp_slope));

  Expr runge = parse("(sin(10*x)+cos(7*pi*x))/(100*x^2+1)");
  bool to = false;
  CaseLimits minute;
  minute.time = std::chrono::milliseconds(60000);
  double t_l = time_integral(runge, Strategy::LPPoly, 20, 1, minute, &to);
  if (to) o.fail("lppoly did not finish the Runge integral at n=20 within 60 s");
  CaseLimits tight;
  tight.time = std::chrono::milliseconds(std::max<long>(1, static_cast<long>(10 * t_l * 1000)));
  bool poly_to = false;
  double t_p = time_integral(runge, Strategy::Poly, 20, 1, tight, &poly_to);
  if (!poly_to)
    o.fail("poly finished the Runge integral at n=20 in " + std::to_string(t_p * 1000) + " ms, within 10x lppoly (" +
           std::to_string(t_l * 1000) + " ms) and below the degree cap");

  o.detail << " (bfun slope " << bf_slope << " over " << bf.size() << " points";
  if (!bf_timeouts.empty()) o.detail << ", n>=" << bf_timeouts.front() << " over the 40 s budget";
  o.detail << "; ppoly slope " << pp_slope << "; Runge n=20 lppoly " << t_l * 1000 << " ms, poly "
           << (poly_to ? "out of budget" : std::to_string(t_p * 1000) + " ms") << ")";
  return o;
}

// ---------------------------------------------------------------------------------------
// 7. Root isolation.

Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<int> deg(1, 8);
  std::uniform_int_distribution<long> coef(-30, 30);
  int roots = 0;
  for (int t = 0; t < 500; ++t) {
    PowerPolyInt p;
    int k = deg(rng);
    for (int i = 0; i <= k; ++i) p.coeffs.emplace_back(coef(rng));
    if (p.coeffs.back() == 0) p.coeffs.back() = 1;
    auto res = isolate(p, mpq_class(0), 10);
    auto q = oracle::oracle_square_free(oracle::qpoly(p.coeffs));
    int total = oracle::oracle_sturm_count(q, -1, 1) + (oracle::horner(q, -1) == 0 ? 1 : 0);
    int covered = 0;
    for (const auto& iv : res.intervals) {
      if (iv.diameter() > Dyadic::pow2(-10)) o.fail("trial " + std::to_string(t) + ": interval wider than 2^-10");
      mpq_class lo = iv.lo().to_mpq(), hi = iv.hi().to_mpq();
      int c = lo == hi ? (oracle::horner(q, lo) == 0 ? 1 : 0)
                       : oracle::oracle_sturm_count(q, lo, hi) + (oracle::horner(q, lo) == 0 ? 1 : 0);
      if (c != 1) o.fail("trial " + std::to_string(t) + ": interval holds " + std::to_string(c) + " roots");
      covered += c;
    }
    if (static_cast<int>(res.intervals.size()) != total || covered != total)
      o.fail("trial " + std::to_string(t) + ": " + std::to_string(res.intervals.size()) + " intervals for " +
             std::to_string(total) + " roots");
    roots += total;
  }
  o.detail << " (500 polynomials, " << roots << " roots in [-1,1])";
  return o;
}

// ---------------------------------------------------------------------------------------
// 8. Markov bound.

Outcome criterion8() {
  Outcome o;
  std::mt19937_64 rng(88);
  std::uniform_int_distribution<int> deg(0, 8);
  std::uniform_int_distribution<long> coef(-1000, 1000);
  for (int t = 0; t < 200; ++t) {
    ChebEnclosure p;
    int k = deg(rng);
    for (int j = 0; j <= k; ++j) p.set(j, Dyadic(mpz_class(coef(rng)), -7));
    std::vector<std::pair<int, Dyadic>> terms(p.coeffs.begin(), p.coeffs.end());
    mpq_class L = markov_bound(p).to_mpq();
    for (int i = 0; i < 1000; ++i) {
      mpq_class x = oracle::random_dyadic(rng, -1, 1, 20).to_mpq(), y = oracle::random_dyadic(rng, -1, 1, 20).to_mpq();
      if (i % 3 == 0) y = x + mpq_class(1, 1 << 20) * (y > x ? 1 : -1);  // close pairs probe the derivative
      if (y < -1 || y > 1) continue;
      if (abs(oracle::cheb_value(terms, x) - oracle::cheb_value(terms, y)) > L * abs(x - y)) {
        o.fail("polynomial " + std::to_string(t));
        break;
      }
    }
  }
  o.detail << " (200 polynomials x 1000 pairs)";
  return o;
}

// ---------------------------------------------------------------------------------------
// 9. paramax and max2.

// Continuous random piecewise cubic with breakpoints on the 1/8 grid.
PPoly random_cubic(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pieces(1, 4);
  std::uniform_int_distribution<long> coef(-256, 256), pos(-7, 7);
  int k = pieces(rng);
  std::set<long> cuts;
  while (static_cast<int>(cuts.size()) < k - 1) cuts.insert(pos(rng));
  std::vector<Dyadic> bp{Dyadic(-1)};
  for (long c : cuts) bp.push_back(Dyadic(mpz_class(c), -3));
  bp.push_back(Dyadic(1));
  std::vector<Piece> ps;
  mpq_class carry = 0;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    ChebEnclosure p;
    mpq_class at_m1 = 0, at_p1 = 0;
    for (int j = 1; j <= 3; ++j) {
      long c = coef(rng);
      p.set(j, Dyadic(mpz_class(c), -8));
      at_m1 += mpq_class(j % 2 ? -c : c, 256);
      at_p1 += mpq_class(c, 256);
    }
    mpq_class c0 = carry - at_m1;
    p.set(0, Dyadic(mpz_class(c0 * 256), -8));
    carry = c0 + at_p1;
    ps.push_back(Piece{bp[i], bp[i + 1], p});
  }
  return PPoly(std::move(ps));
}

Outcome criterion9() {
  Outcome o;
  std::mt19937_64 rng(99);
  mpq_class tol(1, 1024);
  for (int t = 0; t < 50; ++t) {
    PPoly f = random_cubic(rng), g = random_cubic(rng);
    PPoly r = pp_paramax(f, 10), m = pp_max2(f, g, 10);
    // Grid of 10^4 points plus every breakpoint of f, so prefix maxima at kinks are exact.
    std::vector<mpq_class> xs;
    for (int i = 0; i <= 10000; ++i) {
      mpq_class x(2 * i - 10000, 10000);
      x.canonicalize();
      xs.push_back(x);
    }
    for (const auto& b : f.breakpoints()) xs.push_back(b.to_mpq());
    std::sort(xs.begin(), xs.end());
    mpq_class running = oracle::pp_value(f, -1);
    for (const auto& x : xs) {
      mpq_class fx = oracle::pp_value(f, x);
      running = std::max(running, fx);
      mpq_class err, v = oracle::pp_value(r, x, &err);
      if (abs(v - running) > tol + err) {
        o.fail("paramax #" + std::to_string(t) + " at x=" + x.get_str());
        break;
      }
      mpq_class merr, mv = oracle::pp_value(m, x, &merr);
      if (abs(mv - std::max(fx, oracle::pp_value(g, x))) > tol + merr) {
        o.fail("max2 #" + std::to_string(t) + " at x=" + x.get_str());
        break;
      }
    }
  }
  o.detail << " (50 pairs of piecewise cubics, 10^4 points)";
  return o;
}

// ---------------------------------------------------------------------------------------
// 10. Cross-strategy agreement on the smoke suite.

Outcome criterion10() {
  Outcome o;
  BenchSuite suite = bench_suite("smoke");
  CaseLimits limits;
  limits.time = std::chrono::milliseconds(2000);
  int pairs = 0, timeouts = 0, unsupported = 0;
  for (const auto& be : suite.exprs) {
    Expr e = parse(be.text);
    for (Query q : suite.ops) {
      std::map<std::int64_t, std::vector<std::pair<Strategy, Ball>>> got;
      for (Strategy s : suite.strategies) {
        for (std::int64_t n : {5, 10, 15, 20}) {
          BenchRecord r;
          try {
            r = run_case(be.id, e, s, q, n, limits);
          } catch (const Error&) {
            ++unsupported;
            break;
          }
          if (r.timeout) {
            timeouts += 1;
            break;
          }
          got[n].emplace_back(s, *r.result);
        }
      }
      for (auto& [n, balls] : got)
        for (std::size_t i = 0; i < balls.size(); ++i)
          for (std::size_t j = i + 1; j < balls.size(); ++j) {
            ++pairs;
            const Ball &a = balls[i].second, &b = balls[j].second;
            if (max(a.lo(), b.lo()) > min(a.hi(), b.hi()))
              o.fail(be.id + " " + query_name(q) + " n=" + std::to_string(n) + ": " + strategy_name(balls[i].first) +
                     " and " + strategy_name(balls[j].first) + " disagree");
          }
    }
  }
  o.detail << " (" << pairs << " intersecting pairs; " << timeouts << " timeouts at 2 s and " << unsupported
           << " unsupported combinations excluded)";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const std::vector<Entry> all{
      {1, "enclosure soundness on the benchmark expressions", criterion1},
      {2, "bounded division contract", criterion2},
      {3, "initial guess within 3/(4P)", criterion3},
      {4, "Frac integral through PPoly", criterion4},
      {5, "x^2 segment and |x| degree lower bounds", criterion5},
      {6, "scaling separation", criterion6},
      {7, "root isolation against a Sturm oracle", criterion7},
      {8, "Markov bound", criterion8},
      {9, "paramax and max2 against grid oracles", criterion9},
      {10, "cross-strategy agreement on the smoke suite", criterion10},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  bool ok = true;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    auto t0 = Clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.fail(std::string("exception: ") + e.what());
    }
    ok = ok && out.pass;
    std::cout << (out.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << out.detail.str() << " ["
              << std::fixed << std::setprecision(1) << seconds_since(t0) << " s]" << std::defaultfloat << std::endl;
  }
  return ok ? 0 : 1;
}
