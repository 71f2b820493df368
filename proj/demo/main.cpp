// Walks through the main representations on the Runge-type quotient
// (sin(10x) + cos(7πx)) / (100x² + 1), then shows the two polynomial-size lower bounds.

#include <chrono>
#include <iostream>

#include "fnreps/bench.hpp"
#include "fnreps/witness.hpp"

using namespace fnreps;

namespace {

void show(const char* label, const std::function<Ball()>& run, std::int64_t bits) {
  auto t0 = std::chrono::steady_clock::now();
  try {
    Ball b = run();
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "  " << label << ": " << format_answer(b, bits) << "  (" << ms << " ms)\n";
  } catch (const Error& e) {
    std::cout << "  " << label << ": " << e.what() << '\n';
  }
}

}  // namespace

int main() {
  Expr runge = parse("(sin(10*x)+cos(7*pi*x))/(100*x^2+1)");
  std::cout << "f(x) = " << structure(runge) << "\n\n";

  const std::int64_t bits = 24;
  std::cout << "Integral over [-1,1] to 2^-" << bits << ":\n";
  for (Strategy s : {Strategy::PPoly, Strategy::LPPoly, Strategy::LPoly, Strategy::Poly}) {
    BudgetScope scope(Budget::with_time_limit(std::chrono::seconds(20)));
    show(strategy_name(s), [&] { return eval_integral(runge, s).query(bits + 2); }, bits);
  }

  std::cout << "\nMaximum over [-1,1] to 2^-" << bits << ":\n";
  for (Strategy s : {Strategy::PPoly, Strategy::LPPoly}) {
    BudgetScope scope(Budget::with_time_limit(std::chrono::seconds(20)));
    show(strategy_name(s), [&] { return eval_max(runge, s).query(bits + 2); }, bits);
  }

  std::cout << "\nEvaluator-based names pay for every bit with more subdivision:\n";
  for (std::int64_t n : {4, 6, 8}) {
    BudgetScope scope(Budget::with_time_limit(std::chrono::seconds(20)));
    std::string label = "bfun at 2^-" + std::to_string(n);
    show(label.c_str(), [&] { return eval_integral(runge, Strategy::BFun).query(n + 2); }, n);
  }

  std::cout << "\nPiecewise name of 1/(100x^2+1) from bounded Newton division:\n";
  PPoly denom = eval_ppoly(parse("100*x^2+1"), 20);
  PPoly inv = pp_divide(denom, 20);
  std::cout << "  " << inv.size() << " pieces, max degree " << inv.max_degree() << ", error "
            << decimal_up(inv.error_radius(), 3) << '\n';

  std::cout << "\nMinimal sizes for accuracy 2^-n:\n  n   segments for x^2   Chebyshev degree for |x|\n";
  for (std::int64_t n = 4; n <= 14; n += 2)
    std::cout << "  " << n << "   " << paff_min_segments_x2(n) << "                  " << abs_min_cheb_degree(n) << '\n';
}
