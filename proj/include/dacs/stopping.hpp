#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dacs/common.hpp"
#include "dacs/rng.hpp"

namespace dacs {

// Conditional support of N_t given the state at the BH stopping time.
struct SupportRange {
  int lo = 0;
  int hi = -1;
  int size() const { return hi - lo + 1; }
  bool contains(int s) const { return s >= lo && s <= hi; }
};

SupportRange support_range(int t, int tau_bh, int n_tau, int n);

// Increasing list of times over which rewards are computed; always contains
// 1 and tau_bh. A unit-gap grid recovers the full computation.
struct TimeGrid {
  std::vector<int> times;
  int size() const { return static_cast<int>(times.size()); }
  bool unit_gap() const;
};

TimeGrid full_grid(int tau_bh);
TimeGrid build_grid(int tau_bh, int target_q);

// Reward or Snell values over the per-time supports; dense rows offset by
// each support's lower end.
struct StageTable {
  std::vector<int> times;
  std::vector<SupportRange> support;
  std::vector<std::vector<double>> values;

  double at(int q, int s) const {
    if (q < 0 || q >= static_cast<int>(times.size()) ||
        !support[q].contains(s))
      throw MissingCell("StageTable: cell (" + std::to_string(q) + "," +
                        std::to_string(s) + ") not populated");
    return values[q][s - support[q].lo];
  }
  double& cell(int q, int s) { return values[q][s - support[q].lo]; }
  static StageTable shaped(const TimeGrid& grid, int tau_bh, int n_tau, int n);
};

// Backward induction E_t = max(R_t, E[E_{t-1} | .]) on a unit-gap table.
StageTable snell_envelope(const StageTable& rewards, int n);

// Same on an arbitrary grid; gaps mix with hypergeometric weights. Bit-equal
// to snell_envelope when the grid has unit gaps.
StageTable coarse_snell(const StageTable& rewards, int n);

// max{t in grid : R_t(N_t) >= E_t(N_t)}; observed_N[t] is the realized
// calibration-above count, indexed 0..n+m.
int optimal_stopping_time(const StageTable& rewards, const StageTable& snell,
                          const std::vector<int>& observed_N);

// Plain Monte-Carlo reward: mean of opt_value over L uniform membership
// draws from B(t, s); the stream depends only on (seed, t, s).
double mc_reward(int t, int s, int n,
                 const std::function<double(const std::vector<std::uint8_t>&)>&
                     opt_value_fn,
                 int L, std::uint64_t seed);

}  // namespace dacs
