#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

#include "fnreps/error.hpp"

namespace fnreps {

/// Resource limits for one computation. Exceeding any of them raises Errc::Timeout.
struct Budget {
  std::uint64_t max_nodes = std::uint64_t{1} << 24;
  std::size_t max_degree = 4096;
  std::optional<std::chrono::steady_clock::time_point> deadline;

  static Budget with_time_limit(std::chrono::milliseconds ms) {
    Budget b;
    b.deadline = std::chrono::steady_clock::now() + ms;
    return b;
  }
};

/// Work counters collected while a BudgetScope is active.
struct Stats {
  std::uint64_t nodes = 0;
  std::size_t max_degree = 0;
};

namespace detail {
struct BudgetState {
  Budget budget;
  Stats stats;
};
inline thread_local BudgetState* current_budget = nullptr;
}  // namespace detail

/// Installs a budget for the current thread; nested scopes shadow outer ones.
class BudgetScope {
 public:
  explicit BudgetScope(Budget b) : prev_(detail::current_budget) {
    state_.budget = b;
    detail::current_budget = &state_;
  }
  ~BudgetScope() { detail::current_budget = prev_; }
  BudgetScope(const BudgetScope&) = delete;
  BudgetScope& operator=(const BudgetScope&) = delete;

  const Stats& stats() const { return state_.stats; }

 private:
  detail::BudgetState state_;
  detail::BudgetState* prev_;
};

inline void check_deadline() {
  auto* s = detail::current_budget;
  if (s && s->budget.deadline && std::chrono::steady_clock::now() > *s->budget.deadline)
    throw Error(Errc::Timeout, "deadline exceeded");
}

inline void charge_nodes(std::uint64_t k = 1) {
  auto* s = detail::current_budget;
  if (!s) return;
  s->stats.nodes += k;
  if (s->stats.nodes > s->budget.max_nodes)
    throw Error(Errc::Timeout, "node budget of " + std::to_string(s->budget.max_nodes) + " exhausted");
  if ((s->stats.nodes & 0xff) == 0) check_deadline();
}

inline void note_degree(std::size_t d) {
  auto* s = detail::current_budget;
  if (!s) return;
  if (d > s->stats.max_degree) s->stats.max_degree = d;
  if (d > s->budget.max_degree)
    throw Error(Errc::Timeout, "degree cap " + std::to_string(s->budget.max_degree) + " exceeded");
}

}  // namespace fnreps
