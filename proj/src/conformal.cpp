#include "dacs/conformal.hpp"

#include <algorithm>
#include <numeric>

namespace dacs {

std::vector<double> conformal_p_values(const ScoreState& state) {
  const int n = state.n, m = state.m;
  std::vector<double> p(m, 0.0);
  // Walk the sorted order once; count calibration scores at or below each
  // test score.
  int calib_below = 0;
  for (int s = 0; s < n + m; ++s) {
    if (state.membership[s]) {
      ++calib_below;
    } else {
      const int i = state.sort_perm[s] - n;
      p[i] = (1.0 + calib_below) / (n + 1.0);
    }
  }
  return p;
}

int bh_stopping_time(const ScoreState& state, double alpha) {
  const int n = state.n, m = state.m;
  int best = 0;
  int ncal = 0;
  for (int t = 1; t <= n + m; ++t) {
    ncal += state.membership[t - 1];
    const int ntest = t - ncal;
    const double lhs = static_cast<double>(m) * (1.0 + ncal);
    const double rhs = alpha * (n + 1.0) * std::max(1, ntest);
    if (approx_leq(lhs, rhs)) best = t;
  }
  return best;
}

EValueVector e_values_at(const ScoreState& state, int t) {
  const int n = state.n, m = state.m;
  EValueVector e;
  e.t = t;
  e.denom = 1 + n - state.calib_above[t];
  e.values.assign(m, 0.0);
  const double pos = (n + 1.0) / static_cast<double>(e.denom);
  for (int i = 0; i < m; ++i)
    if (state.test_rank[i] <= t) e.values[i] = pos;
  return e;
}

bool is_self_consistent(const std::vector<int>& selected,
                        const EValueVector& e, double alpha, int m) {
  if (selected.empty()) return true;
  const double threshold =
      static_cast<double>(m) / (alpha * static_cast<double>(selected.size()));
  for (int i : selected)
    if (!approx_geq(e.values[i], threshold)) return false;
  return true;
}

std::vector<int> bh_on_pvalues(const std::vector<double>& pvals,
                               double alpha) {
  const int m = static_cast<int>(pvals.size());
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return pvals[a] < pvals[b]; });
  int kstar = 0;
  for (int k = 1; k <= m; ++k)
    if (approx_leq(pvals[order[k - 1]], alpha * k / m)) kstar = k;
  std::vector<int> rej(order.begin(), order.begin() + kstar);
  std::sort(rej.begin(), rej.end());
  return rej;
}

std::vector<int> cs_selection(const ScoreState& state, double alpha) {
  const int tau = bh_stopping_time(state, alpha);
  std::vector<int> sel;
  if (tau == 0) return sel;
  for (int i = 0; i < state.m; ++i)
    if (state.test_rank[i] <= tau) sel.push_back(i);
  return sel;
}

}  // namespace dacs
