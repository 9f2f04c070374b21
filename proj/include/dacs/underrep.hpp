#pragma once

#include <vector>

#include "dacs/score_state.hpp"
#include "dacs/stopping.hpp"

namespace dacs {

// Size floor K_t and feasibility threshold rho_t of the self-consistency
// constraints at time t when N_t = s.
struct BudgetParams {
  long k_budget = 1;  // K_t
  double rho = 0.0;   // rho_t
  bool feasible = false;  // n - s <= rho_t, evaluated with tolerance
};

BudgetParams budget_params(int t, int s, double alpha, int n, int m);

// Cumulative category tallies along the sorted order.
struct CategoryCounts {
  int C = 0;
  // upto[t][c-1]: points with rank <= t in category c (N_t^c), t = 0..n+m
  std::vector<std::vector<int>> upto;
  // test_upto[t][c-1]: test points among them (N_t^{c,test-below})
  std::vector<std::vector<int>> test_upto;
};

CategoryCounts category_counts(const ScoreState& state, int C);

// Closed-form optimal underrepresentation value at time t given the realized
// test-below category counts.
double underrep_opt_value(int t, int n_calib_above,
                          const std::vector<int>& test_below_counts, int C,
                          double alpha, int n, int m);

// Exact reward: expectation of the optimal value over the conditional
// (multivariate hypergeometric) law of the category counts.
double underrep_reward(int t, int s, const std::vector<int>& populations,
                       double alpha, int n, int m, int C);

// Full reward table over grid x supports. The parallel flavor maps rows over
// OpenMP threads; both produce bit-identical tables.
StageTable underrep_reward_table(const CategoryCounts& counts,
                                 const TimeGrid& grid, int tau_bh, int n_tau,
                                 double alpha, int n, int m);
StageTable underrep_reward_table_parallel(const CategoryCounts& counts,
                                          const TimeGrid& grid, int tau_bh,
                                          int n_tau, double alpha, int n,
                                          int m);

// Greedy e-value optimizer: a maximal-underrepresentation self-consistent
// subset of the test units with rank <= tau. Free choices are resolved by
// lowest score rank for determinism.
std::vector<int> greedy_underrep_select(const ScoreState& state, int tau,
                                        double alpha, int C);

}  // namespace dacs
