#include "dacs/underrep.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cassert>
#include <numeric>

#include "dacs/hypergeom.hpp"

namespace dacs {

BudgetParams budget_params(int t, int s, double alpha, int n, int m) {
  BudgetParams bp;
  const double x = m * (1.0 + n - s) / (alpha * (n + 1.0));
  bp.k_budget = std::max(1L, ceil_tol(x));
  bp.rho = (alpha * t * (n + 1.0) - m) / (alpha * (n + 1.0) + m);
  // n - s <= rho_t, rearranged to dodge cancellation at the boundary.
  bp.feasible =
      approx_geq(alpha * (n + 1.0) * (t - n + s), m * (1.0 + n - s));
  return bp;
}

CategoryCounts category_counts(const ScoreState& state, int C) {
  CategoryCounts cc;
  cc.C = C;
  const int total = state.size();
  cc.upto.assign(total + 1, std::vector<int>(C, 0));
  cc.test_upto.assign(total + 1, std::vector<int>(C, 0));
  for (int t = 1; t <= total; ++t) {
    cc.upto[t] = cc.upto[t - 1];
    cc.test_upto[t] = cc.test_upto[t - 1];
    const ZValue& z = state.sorted_z[t - 1];
    if (!z.is_categorical() || z.category > C)
      throw BadInput("category_counts: need categorical z in [1,C]");
    ++cc.upto[t][z.category - 1];
    if (!state.membership[t - 1]) ++cc.test_upto[t][z.category - 1];
  }
  return cc;
}

double underrep_opt_value(int t, int n_calib_above,
                          const std::vector<int>& test_below_counts, int C,
                          double alpha, int n, int m) {
  const BudgetParams bp = budget_params(t, n_calib_above, alpha, n, m);
  const int mn =
      *std::min_element(test_below_counts.begin(), test_below_counts.end());
  if (static_cast<long>(C) * mn >= bp.k_budget) return 1.0 / C;
  if (!bp.feasible) return -1.0 / C;
  return static_cast<double>(mn) / static_cast<double>(bp.k_budget);
}

namespace {

// E[O_t | N_t = s] from the survival values of the minimum category count:
// O_t = 1/C on {min >= a} and min/K below, with a = ceil(K/C), so
// E = S(a)/C + sum_{nu<a} (S(nu) - S(a))/K.
double reward_from_survival(const std::vector<double>& S, long K, int C) {
  const long a = (K + C - 1) / C;
  const double Sa = S.at(a - 1);
  double r = Sa / C;
  for (long nu = 1; nu < a; ++nu) r += (S[nu - 1] - Sa) / K;
  return r;
}

}  // namespace

double underrep_reward(int t, int s, const std::vector<int>& populations,
                       double alpha, int n, int m, int C) {
  const BudgetParams bp = budget_params(t, s, alpha, n, m);
  if (!bp.feasible) return -1.0 / C;
  const int draws = t - n + s;
  const long a = (bp.k_budget + C - 1) / C;
  const auto S = min_survival_fft(populations, draws, static_cast<int>(a));
  return reward_from_survival(S, bp.k_budget, C);
}

namespace {

void fill_reward_row(const CategoryCounts& counts, int t,
                     const SupportRange& range, double alpha, int n, int m,
                     std::vector<double>& row) {
  const int C = counts.C;
  std::vector<int> draws_list, nu_max;
  std::vector<long> budgets;
  std::vector<char> feas;
  for (int s = range.lo; s <= range.hi; ++s) {
    const BudgetParams bp = budget_params(t, s, alpha, n, m);
    budgets.push_back(bp.k_budget);
    feas.push_back(bp.feasible ? 1 : 0);
    draws_list.push_back(t - n + s);
    nu_max.push_back(
        bp.feasible ? static_cast<int>((bp.k_budget + C - 1) / C) : 0);
  }
  const auto surv =
      min_survival_fft_batch(counts.upto[t], draws_list, nu_max);
  for (int s = range.lo; s <= range.hi; ++s) {
    const int j = s - range.lo;
    row[j] = feas[j] ? reward_from_survival(surv[j], budgets[j], C)
                     : -1.0 / C;
  }
}

}  // namespace

StageTable underrep_reward_table(const CategoryCounts& counts,
                                 const TimeGrid& grid, int tau_bh, int n_tau,
                                 double alpha, int n, int m) {
  StageTable tab = StageTable::shaped(grid, tau_bh, n_tau, n);
  for (int q = 0; q < grid.size(); ++q)
    fill_reward_row(counts, grid.times[q], tab.support[q], alpha, n, m,
                    tab.values[q]);
  return tab;
}

StageTable underrep_reward_table_parallel(const CategoryCounts& counts,
                                          const TimeGrid& grid, int tau_bh,
                                          int n_tau, double alpha, int n,
                                          int m) {
  StageTable tab = StageTable::shaped(grid, tau_bh, n_tau, n);
  const int Q = grid.size();
#pragma omp parallel for schedule(dynamic)
  for (int q = 0; q < Q; ++q)
    fill_reward_row(counts, grid.times[q], tab.support[q], alpha, n, m,
                    tab.values[q]);
  return tab;
}

std::vector<int> greedy_underrep_select(const ScoreState& state, int tau,
                                        double alpha, int C) {
  if (tau < 1) throw BadInput("greedy_underrep_select: tau >= 1");
  const int n = state.n, m = state.m;
  const BudgetParams bp =
      budget_params(tau, state.calib_above[tau], alpha, n, m);
  if (!bp.feasible) return {};

  // Active candidates per category, ordered by score rank.
  std::vector<std::vector<int>> groups(C);
  for (int s = 0; s < tau; ++s) {
    if (state.membership[s]) continue;
    const ZValue& z = state.sorted_z[s];
    if (!z.is_categorical() || z.category > C)
      throw BadInput("greedy_underrep_select: need categorical z in [1,C]");
    groups[z.category - 1].push_back(state.sort_perm[s] - n);
  }
  std::vector<int> order(C);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return groups[a].size() < groups[b].size();
  });

  const long K = bp.k_budget;
  const long s1 = static_cast<long>(groups[order[0]].size());
  std::vector<int> selected;

  if (C * s1 >= K) {
    // The ceiling value 1/C is attainable: equalize at the smallest size.
    for (int c : order)
      selected.insert(selected.end(), groups[c].begin(),
                      groups[c].begin() + s1);
  } else {
    std::size_t c = 0;
    while (c < order.size() &&
           static_cast<long>((C - c) * groups[order[c]].size()) <
               K - static_cast<long>(selected.size())) {
      selected.insert(selected.end(), groups[order[c]].begin(),
                      groups[order[c]].end());
      ++c;
    }
    assert(c > 0 && c < order.size());
    // Top up to exactly K without dethroning the least-represented category:
    // everyone remaining gets at least the previous category's size.
    const long base = static_cast<long>(groups[order[c - 1]].size());
    long extra = K - static_cast<long>(selected.size()) -
                 base * static_cast<long>(order.size() - c);
    assert(extra >= 0);
    for (std::size_t j = c; j < order.size(); ++j) {
      const auto& g = groups[order[j]];
      long take = base + std::min<long>(extra, g.size() - base);
      extra -= take - base;
      selected.insert(selected.end(), g.begin(), g.begin() + take);
    }
    assert(extra == 0);
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

}  // namespace dacs
