#pragma once

// Benchmark suites, single-case runner and CSV records shared by the command-line tool and
// the acceptance checks.

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "fnreps/eval.hpp"

namespace fnreps {

struct BenchExpr {
  std::string id;
  std::string text;
};

struct BenchSuite {
  std::string name;
  std::vector<BenchExpr> exprs;
  std::vector<Strategy> strategies;
  std::vector<Query> ops;
};

inline const char* query_name(Query q) { return q == Query::Max ? "max" : "integrate"; }

inline std::optional<Query> parse_query(std::string_view s) {
  if (s == "max") return Query::Max;
  if (s == "integrate") return Query::Integrate;
  return std::nullopt;
}

inline BenchSuite bench_suite(std::string_view name) {
  std::vector<Strategy> all(kAllStrategies.begin(), kAllStrategies.end());
  std::vector<Query> ops{Query::Max, Query::Integrate};
  if (name == "paper-figs")
    return {"paper-figs",
            {{"sin10x+cos20x", "sin(10*x)+cos(20*x)"},
             {"sin10x+cos7pix", "sin(10*x)+cos(7*pi*x)"},
             {"nested-sin", "sin(10*x+sin(7*pi*x^2))+cos(10*x)"},
             {"runge", "(sin(10*x)+cos(7*pi*x))/(100*x^2+1)"},
             {"sin-denominator", "(sin(10*x)+cos(7*pi*x))/(10*sin(7*x)^2+1)"},
             {"max-sin-cos", "max(sin(10*x),cos(11*x))"},
             {"max-parabola-quotient", "max(x^2/2,(sin(10*x)+cos(7*pi*x))/(10*sin(7*x)^2+1))"}},
            all,
            ops};
  if (name == "smoke") return {"smoke", {{"one", "1"}, {"x", "x"}, {"x2", "x^2"}, {"abs", "max(x,-x)"}}, all, ops};
  throw Error(Errc::UnknownSuite, "unknown benchmark suite '" + std::string(name) + "'");
}

/// Accuracy ladder 5, 8, ..., 35.
inline std::vector<std::int64_t> bits_ladder() {
  std::vector<std::int64_t> v;
  for (std::int64_t b = 5; b <= 35; b += 3) v.push_back(b);
  return v;
}

struct CaseLimits {
  std::uint64_t max_nodes = std::uint64_t{1} << 24;
  std::size_t max_degree = 4096;
  std::optional<std::chrono::milliseconds> time;
};

struct BenchRecord {
  std::string expr_id;
  Strategy strategy{};
  Query op{};
  std::int64_t accuracy_bits = 0;
  std::int64_t wall_time_ms = 0;
  std::optional<Ball> result;  // empty on timeout
  std::uint64_t metric = 0;    // evaluator nodes for the Fun family, peak degree otherwise
  bool timeout = false;
};

inline bool is_evaluator_strategy(Strategy s) {
  return s == Strategy::Fun || s == Strategy::BFun || s == Strategy::DBFun;
}

/// Runs one query under fresh limits. Timeouts become flagged records; every other error
/// propagates.
inline BenchRecord run_case(const std::string& id, const Expr& e, Strategy s, Query q, std::int64_t bits,
                            const CaseLimits& limits = {}) {
  BenchRecord r{id, s, q, bits};
  Budget budget{limits.max_nodes, limits.max_degree, std::nullopt};
  auto t0 = std::chrono::steady_clock::now();
  if (limits.time) budget.deadline = t0 + *limits.time;
  BudgetScope scope(budget);
  try {
    CauchyReal v = q == Query::Max ? eval_max(e, s) : eval_integral(e, s);
    r.result = v.query(bits);
  } catch (const Error& err) {
    if (err.code() != Errc::Timeout) throw;
    r.timeout = true;
  }
  r.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  r.metric = is_evaluator_strategy(s) ? scope.stats().nodes : scope.stats().max_degree;
  return r;
}

inline const char* csv_header() {
  return "expr_id,strategy,op,accuracy_bits,wall_time_ms,result_center,result_radius,metric,timeout_flag";
}

/// Fewest decimal places d for which half a unit in the last place plus a radius of
/// 2^-(bits+2) stays below 2^-bits, that is 2^(bits+1) < 3·10^d.
inline int decimal_digits(std::int64_t bits) {
  mpz_class lhs, rhs(3);
  mpz_ui_pow_ui(lhs.get_mpz_t(), 2, static_cast<unsigned long>(std::max<std::int64_t>(bits, 0) + 1));
  int d = 0;
  while (rhs <= lhs) {
    rhs *= 10;
    ++d;
  }
  return d;
}

/// Nonnegative d in scientific notation with `sig` significant digits, rounded upward.
inline std::string decimal_up(const Dyadic& d, int sig = 6) {
  if (d.sign() <= 0) return "0";
  mpq_class q = d.to_mpq();
  long k = static_cast<long>(std::floor(std::log10(d.to_double())));
  auto scaled = [&](long e) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(e)));
    return mpq_class(e >= 0 ? mpq_class(q / p) : mpq_class(q * p));
  };
  // ceil(d / 10^(k-sig+1)) has sig digits; fix k if the double estimate was off by one.
  mpq_class s = scaled(k - sig + 1);
  mpz_class m;
  mpz_cdiv_q(m.get_mpz_t(), s.get_num_mpz_t(), s.get_den_mpz_t());
  if (m.get_str().size() > static_cast<std::size_t>(sig)) {
    ++k;
    s = scaled(k - sig + 1);
    mpz_cdiv_q(m.get_mpz_t(), s.get_num_mpz_t(), s.get_den_mpz_t());
  }
  std::string digits = m.get_str();
  long exp = k - sig + 1 + static_cast<long>(digits.size()) - 1;
  return digits.substr(0, 1) + (digits.size() > 1 ? "." + digits.substr(1) : "") + "e" + std::to_string(exp);
}

inline std::string csv_row(const BenchRecord& r) {
  std::ostringstream o;
  o << r.expr_id << ',' << strategy_name(r.strategy) << ',' << query_name(r.op) << ',' << r.accuracy_bits << ','
    << r.wall_time_ms << ',';
  if (r.result)
    o << r.result->center().decimal(decimal_digits(r.accuracy_bits) + 3) << ',' << decimal_up(r.result->radius());
  else
    o << ',';
  o << ',' << r.metric << ',' << (r.timeout ? 1 : 0);
  return o.str();
}

/// "center ± <2^-bits", given a ball of radius at most 2^-(bits+2). The center is rounded to
/// decimal_digits(bits) places, which keeps the total error strictly below 2^-bits.
inline std::string format_answer(const Ball& b, std::int64_t bits) {
  return b.center().decimal(decimal_digits(bits)) + " ± <2^-" + std::to_string(bits);
}

/// Runs every (expression, strategy, op) over `ladder`, calling `emit` per record. Unsupported
/// or undefined combinations are reported through `skip` once and not retried. After a
/// timeout the higher rungs of that combination are emitted as timeout rows without running.
inline void run_suite(const BenchSuite& suite, const std::vector<std::int64_t>& ladder, const CaseLimits& limits,
                      const std::function<void(const BenchRecord&)>& emit,
                      const std::function<void(const std::string&)>& skip = {}) {
  for (const auto& be : suite.exprs) {
    Expr e = parse(be.text);
    for (Strategy s : suite.strategies)
      for (Query q : suite.ops) {
        bool timed_out = false;
        for (std::int64_t bits : ladder) {
          if (timed_out) {
            BenchRecord r{be.id, s, q, bits};
            r.timeout = true;
            emit(r);
            continue;
          }
          try {
            BenchRecord r = run_case(be.id, e, s, q, bits, limits);
            timed_out = r.timeout;
            emit(r);
          } catch (const Error& err) {
            if (skip) skip(be.id + " " + strategy_name(s) + " " + query_name(q) + ": " + err.what());
            break;
          }
        }
      }
  }
}

}  // namespace fnreps
