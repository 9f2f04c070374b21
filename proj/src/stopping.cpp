#include "dacs/stopping.hpp"

#include <algorithm>
#include <cmath>

#include "dacs/hypergeom.hpp"

namespace dacs {

SupportRange support_range(int t, int tau_bh, int n_tau, int n) {
  if (t < 1 || t > tau_bh) throw BadInput("support_range: t outside [1,tau]");
  return {std::max(n_tau, n - t), std::min(n, tau_bh - t + n_tau)};
}

bool TimeGrid::unit_gap() const {
  for (std::size_t q = 1; q < times.size(); ++q)
    if (times[q] != times[q - 1] + 1) return false;
  return true;
}

TimeGrid full_grid(int tau_bh) {
  TimeGrid g;
  g.times.resize(tau_bh);
  for (int t = 1; t <= tau_bh; ++t) g.times[t - 1] = t;
  return g;
}

TimeGrid build_grid(int tau_bh, int target_q) {
  if (target_q < 2) throw BadInput("build_grid: target_q >= 2");
  if (tau_bh <= target_q) return full_grid(tau_bh);
  TimeGrid g;
  g.times.reserve(target_q);
  // Evenly spaced with both endpoints forced.
  for (int q = 0; q < target_q; ++q) {
    const double x =
        1.0 + static_cast<double>(q) * (tau_bh - 1) / (target_q - 1);
    const int t = static_cast<int>(std::lround(x));
    if (g.times.empty() || t > g.times.back()) g.times.push_back(t);
  }
  g.times.front() = 1;
  g.times.back() = tau_bh;
  return g;
}

StageTable StageTable::shaped(const TimeGrid& grid, int tau_bh, int n_tau,
                              int n) {
  StageTable tab;
  tab.times = grid.times;
  tab.support.reserve(grid.times.size());
  tab.values.reserve(grid.times.size());
  for (int t : grid.times) {
    const SupportRange r = support_range(t, tau_bh, n_tau, n);
    tab.support.push_back(r);
    tab.values.emplace_back(r.size(), 0.0);
  }
  return tab;
}

StageTable snell_envelope(const StageTable& rewards, int n) {
  TimeGrid grid{rewards.times};
  if (!grid.unit_gap())
    throw BadInput("snell_envelope: rewards not on a unit-gap grid");
  StageTable env = rewards;
  for (int q = 1; q < grid.size(); ++q) {
    const int t = rewards.times[q];
    const SupportRange& cur = rewards.support[q];
    for (int s = cur.lo; s <= cur.hi; ++s) {
      const double w_keep = static_cast<double>(t - n + s) / t;
      const double w_up = static_cast<double>(n - s) / t;
      double cont = 0.0;
      if (w_keep != 0.0) cont += w_keep * env.at(q - 1, s);
      if (w_up != 0.0) cont += w_up * env.at(q - 1, s + 1);
      env.cell(q, s) = std::max(rewards.at(q, s), cont);
    }
  }
  return env;
}

StageTable coarse_snell(const StageTable& rewards, int n) {
  StageTable env = rewards;
  const int Q = static_cast<int>(rewards.times.size());
  for (int q = 1; q < Q; ++q) {
    const int t = rewards.times[q];
    const int tprev = rewards.times[q - 1];
    const int gap = t - tprev;
    const SupportRange& cur = rewards.support[q];
    const SupportRange& prev = rewards.support[q - 1];
    for (int s = cur.lo; s <= cur.hi; ++s) {
      double cont = 0.0;
      // Stepping back over `gap` sorted positions removes a uniform draw of
      // them; the count of removed calibration points is hypergeometric.
      for (int sp = prev.lo; sp <= prev.hi; ++sp) {
        const double w = hypergeom_pmf(t, n - s, gap, sp - s);
        if (w != 0.0) cont += w * env.at(q - 1, sp);
      }
      env.cell(q, s) = std::max(rewards.at(q, s), cont);
    }
  }
  return env;
}

int optimal_stopping_time(const StageTable& rewards, const StageTable& snell,
                          const std::vector<int>& observed_N) {
  if (rewards.times != snell.times)
    throw BadInput("optimal_stopping_time: misaligned tables");
  const int Q = static_cast<int>(rewards.times.size());
  for (int q = Q - 1; q >= 0; --q) {
    const int t = rewards.times[q];
    const int s = observed_N.at(t);
    if (rewards.at(q, s) >= snell.at(q, s)) return t;
  }
  // E_1 = R_1 forces a stop at the first grid time.
  return rewards.times.front();
}

std::vector<std::uint8_t> sample_membership(int t, int ones,
                                            std::mt19937_64& rng) {
  if (ones < 0 || ones > t) throw BadInput("sample_membership: bad counts");
  std::vector<std::uint8_t> b(t, 0);
  // Partial Fisher-Yates over positions.
  std::vector<int> pos(t);
  for (int i = 0; i < t; ++i) pos[i] = i;
  for (int k = 0; k < ones; ++k) {
    std::uniform_int_distribution<int> pick(k, t - 1);
    std::swap(pos[k], pos[pick(rng)]);
    b[pos[k]] = 1;
  }
  return b;
}

double mc_reward(int t, int s, int n,
                 const std::function<double(const std::vector<std::uint8_t>&)>&
                     opt_value_fn,
                 int L, std::uint64_t seed) {
  if (L < 1) throw BadInput("mc_reward: L >= 1");
  double acc = 0.0;
  // One stream per (t, s, l): draw l is the same no matter how the loop is
  // scheduled or truncated.
  for (int l = 0; l < L; ++l) {
    auto rng =
        make_engine(seed, Stream::kMcReward, static_cast<std::uint64_t>(t),
                    static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(l));
    const auto b = sample_membership(t, n - s, rng);
    acc += opt_value_fn(b);
  }
  return acc / L;
}

}  // namespace dacs
