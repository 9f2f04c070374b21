#pragma once

// Brute-force reference implementations for checking the fast paths. Test
// support only: everything here trades speed for being independently and
// transparently correct.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "dacs/conformal.hpp"
#include "dacs/diversity.hpp"
#include "dacs/qp.hpp"
#include "dacs/score_state.hpp"
#include "dacs/stopping.hpp"

namespace dacs::testing {

inline double log_choose(long n, long k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// P(min_c H_c >= nu) by direct enumeration of the multivariate
// hypergeometric PMF (products of binomial coefficients).
inline double min_survival_enum(const std::vector<int>& counts, int draws,
                                int nu) {
  const int C = static_cast<int>(counts.size());
  long total = 0;
  for (int c : counts) total += c;
  if (draws < 0 || draws > total) return 0.0;
  const double ltot = log_choose(total, draws);
  double prob = 0.0;
  std::vector<int> h(C, 0);
  std::function<void(int, int, double)> rec = [&](int c, int left,
                                                  double lacc) {
    if (c == C - 1) {
      if (left >= nu && left <= counts[c])
        prob += std::exp(lacc + log_choose(counts[c], left) - ltot);
      return;
    }
    for (int k = nu; k <= std::min(counts[c], left); ++k)
      rec(c + 1, left - k, lacc + log_choose(counts[c], k));
  };
  if (nu <= 0) return 1.0;
  rec(0, draws, 0.0);
  return prob;
}

// Maximal diversity over every self-consistent subset of the active test
// units, by exhaustive enumeration (m <= ~20).
inline double exhaustive_selfconsistent_optimum(
    const ScoreState& state, int t, double alpha, const DiversityMetric& metric,
    const std::vector<int>& test_categories) {
  const int m = state.m;
  const EValueVector e = e_values_at(state, t);
  double best = eval_set(metric, {}, test_categories);
  for (unsigned long mask = 1; mask < (1UL << m); ++mask) {
    std::vector<int> sel;
    for (int i = 0; i < m; ++i)
      if (mask & (1UL << i)) sel.push_back(i);
    if (!is_self_consistent(sel, e, alpha, m)) continue;
    best = std::max(best, eval_set(metric, sel, test_categories));
  }
  return best;
}

// Optimal-stopping value from state (t, s): backward induction over the full
// history tree with combinatorial child weights. Independent of the support
// and table machinery under test.
class SnellTreeOracle {
 public:
  // reward(t, s) for 1 <= t <= tau, s in the valid range.
  SnellTreeOracle(std::function<double(int, int)> reward, int n)
      : reward_(std::move(reward)), n_(n) {}

  double value(int t, int s) {
    const auto key = std::make_pair(t, s);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const double stop = reward_(t, s);
    double v = stop;
    if (t > 1) {
      // Of the t smallest positions, n - s are calibration; the t-th position
      // is calibration with probability (n - s) / t by counting.
      const int ones = n_ - s;
      const double p_cal = static_cast<double>(ones) / t;
      double cont = 0.0;
      if (p_cal > 0.0) cont += p_cal * value(t - 1, s + 1);
      if (p_cal < 1.0) cont += (1.0 - p_cal) * value(t - 1, s);
      v = std::max(stop, cont);
    }
    memo_[key] = v;
    return v;
  }

 private:
  std::function<double(int, int)> reward_;
  int n_;
  std::map<std::pair<int, int>, double> memo_;
};

// Capped-simplex projection by bisection on the shift (independent of the
// breakpoint walk under test).
inline Eigen::VectorXd capped_simplex_bisect(const Eigen::VectorXd& y,
                                             const Eigen::VectorXd& cap,
                                             double total) {
  auto sum_at = [&](double mu) {
    double s = 0.0;
    for (int i = 0; i < y.size(); ++i)
      s += std::clamp(y[i] - mu, 0.0, cap[i]);
    return s;
  };
  double lo = y.minCoeff() - cap.maxCoeff() - 1.0, hi = y.maxCoeff() + 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sum_at(mid) > total)
      lo = mid;
    else
      hi = mid;
  }
  const double mu = 0.5 * (lo + hi);
  Eigen::VectorXd x(y.size());
  for (int i = 0; i < y.size(); ++i) x[i] = std::clamp(y[i] - mu, 0.0, cap[i]);
  // Exact sum repair along the active coordinates.
  double gap = total - x.sum();
  for (int i = 0; i < y.size() && std::fabs(gap) > 0; ++i) {
    const double room_up = cap[i] - x[i], room_dn = x[i];
    const double adj = std::clamp(gap, -room_dn, room_up);
    x[i] += adj;
    gap -= adj;
  }
  return x;
}

// Grid-over-s RSC projection oracle: dense scan of the section objective
// with local refinement around the best coarse point.
inline Eigen::VectorXd grid_project_rsc(const Eigen::VectorXd& y,
                                        double kappa) {
  const int d = static_cast<int>(y.size());
  if (kappa >= 1.0) return y.cwiseMax(0.0).cwiseMin(1.0);
  if (kappa < 1.0 / d) return Eigen::VectorXd::Zero(d);
  auto x_of_s = [&](double s) {
    const double cap = std::min(kappa * s, 1.0);
    return capped_simplex_bisect(y, Eigen::VectorXd::Constant(d, cap), s);
  };
  auto dist2 = [&](double s) { return (x_of_s(s) - y).squaredNorm(); };

  double best_s = 0.0, best_v = y.cwiseMax(0.0).squaredNorm();  // s = 0
  const int coarse = 4000;
  for (int k = 0; k <= coarse; ++k) {
    const double s = d * static_cast<double>(k) / coarse;
    const double v = dist2(s);
    if (v < best_v) {
      best_v = v;
      best_s = s;
    }
  }
  double lo = std::max(0.0, best_s - 2.0 * d / coarse);
  double hi = std::min<double>(d, best_s + 2.0 * d / coarse);
  for (int round = 0; round < 8; ++round) {
    double bs = best_s;
    for (int k = 0; k <= 200; ++k) {
      const double s = lo + (hi - lo) * k / 200.0;
      const double v = dist2(s);
      if (v < best_v) {
        best_v = v;
        bs = s;
      }
    }
    best_s = bs;
    const double w = (hi - lo) / 10.0;
    lo = std::max(0.0, best_s - w);
    hi = std::min<double>(d, best_s + w);
  }
  return x_of_s(best_s);
}

// Exhaustive expectation of a rounded set statistic over all 2^p outcomes.
inline double exhaustive_rounding_expectation(
    const Eigen::VectorXd& chi,
    const std::function<double(const std::vector<int>&)>& set_value) {
  const int p = static_cast<int>(chi.size());
  double acc = 0.0;
  for (unsigned long mask = 0; mask < (1UL << p); ++mask) {
    double prob = 1.0;
    std::vector<int> sel;
    for (int i = 0; i < p; ++i) {
      if (mask & (1UL << i)) {
        prob *= chi[i];
        sel.push_back(i);
      } else {
        prob *= 1.0 - chi[i];
      }
    }
    if (prob > 0.0) acc += prob * set_value(sel);
  }
  return acc;
}

}  // namespace dacs::testing
