#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "fnreps/bench.hpp"

using namespace fnreps;

namespace {

int exit_code(Errc c) {
  switch (c) {
    case Errc::ParseError: return 2;
    case Errc::Unsupported: return 3;
    case Errc::NotBoundedBelow: return 4;
    case Errc::Timeout: return 5;
    default: return 1;
  }
}

void print_dump(const Expr& e, Strategy s, std::int64_t bits) {
  std::int64_t w = bits + kGuardBits;
  switch (s) {
    case Strategy::Poly: std::cout << dump(eval_poly(e, w)) << '\n'; break;
    case Strategy::PPoly: std::cout << dump(eval_ppoly(e, w)) << '\n'; break;
    case Strategy::Frac: std::cout << dump(eval_frac(e, w)) << '\n'; break;
    default: std::cout << structure(e) << '\n'; break;
  }
}

int run_bench(const std::string& suite_name, const std::string& csv_path, const CaseLimits& limits) {
  BenchSuite suite = bench_suite(suite_name);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!csv_path.empty()) {
    bool fresh = !std::filesystem::exists(csv_path) || std::filesystem::file_size(csv_path) == 0;
    file.open(csv_path, std::ios::app);
    if (!file) {
      std::cerr << "cannot open " << csv_path << '\n';
      return 1;
    }
    out = &file;
    if (fresh) *out << csv_header() << '\n';
  } else {
    *out << csv_header() << '\n';
  }
  run_suite(
      suite, bits_ladder(), limits,
      [&](const BenchRecord& r) {
        *out << csv_row(r) << '\n';
        out->flush();
        if (!csv_path.empty())
          std::cerr << r.expr_id << ' ' << strategy_name(r.strategy) << ' ' << query_name(r.op) << ' '
                    << r.accuracy_bits << (r.timeout ? " timeout" : "") << " " << r.wall_time_ms << "ms\n";
      },
      [](const std::string& why) { std::cerr << "skipped " << why << '\n'; });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rigorous maximum and integral of real functions on [-1,1]"};
  std::string repr = "ppoly", op = "integrate", text, bench, csv;
  std::int64_t bits = 10;
  bool want_dump = false;
  std::uint64_t timeout_nodes = 0;
  std::int64_t timeout_ms = 0;
  app.add_option("--repr", repr, "Representation")
      ->check(CLI::IsMember({"fun", "bfun", "dbfun", "poly", "ppoly", "frac", "lpoly", "lppoly"}));
  app.add_option("--op", op, "Query")->check(CLI::IsMember({"max", "integrate"}));
  app.add_option("--bits", bits, "Accuracy in bits")->check(CLI::Range(0, 100000));
  app.add_option("--expr", text, "Expression in x, e.g. \"sin(10*x)+cos(7*pi*x)\"");
  app.add_flag("--dump", want_dump, "Print the function name before the answer");
  app.add_option("--bench", bench, "Run a benchmark suite (paper-figs or smoke)");
  app.add_option("--csv", csv, "Append benchmark rows to this file");
  app.add_option("--timeout-nodes", timeout_nodes, "Node budget per query");
  app.add_option("--timeout-ms", timeout_ms, "Wall-clock budget per query in milliseconds");
  CLI11_PARSE(app, argc, argv);

  CaseLimits limits;
  if (timeout_nodes > 0) limits.max_nodes = timeout_nodes;
  if (timeout_ms > 0) limits.time = std::chrono::milliseconds(timeout_ms);

  try {
    if (!bench.empty()) return run_bench(bench, csv, limits);
    if (text.empty()) {
      std::cerr << "--expr is required unless --bench is given\n";
      return 1;
    }
    Expr e = parse(text);
    Strategy s = *parse_strategy(repr);
    Budget budget{limits.max_nodes, limits.max_degree, std::nullopt};
    if (limits.time) budget.deadline = std::chrono::steady_clock::now() + *limits.time;
    BudgetScope scope(budget);
    if (want_dump) print_dump(e, s, bits);
    CauchyReal v = *parse_query(op) == Query::Max ? eval_max(e, s) : eval_integral(e, s);
    std::cout << format_answer(v.query(bits + 2), bits) << '\n';
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return exit_code(err.code());
  }
  return 0;
}
