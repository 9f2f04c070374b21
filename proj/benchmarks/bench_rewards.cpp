// Times the reward-table kernels, serial vs OpenMP, on a synthetic instance.
// Also checks the two produce bit-identical tables.

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>

#include "dacs/conformal.hpp"
#include "dacs/sim.hpp"
#include "dacs/underrep.hpp"

using Clock = std::chrono::steady_clock;

static double secs(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

int main(int argc, char** argv) {
  int n = 300, m = 300;
  double alpha = 0.5;
  if (argc > 1) n = std::atoi(argv[1]);
  if (argc > 2) m = std::atoi(argv[2]);
  if (argc > 3) alpha = std::atof(argv[3]);

  const dacs::SimSetting setting = dacs::sim_setting("u1", n, m, 400);
  const dacs::SimData data = dacs::simulate_with_predictor(setting, 42);
  const dacs::ScoreState state = dacs::build_score_state(data.calib, data.test);
  const int tau = dacs::bh_stopping_time(state, alpha);
  if (tau == 0) {
    std::printf("tau_bh = 0 for this draw; try a larger alpha\n");
    return 0;
  }
  const int n_tau = state.calib_above[tau];
  const auto counts = dacs::category_counts(state, setting.C);
  const auto grid = dacs::full_grid(tau);

  std::printf("n+m=%d tau_bh=%d cells=%zu\n", n + m, tau, [&] {
    std::size_t cells = 0;
    for (int t = 1; t <= tau; ++t)
      cells += dacs::support_range(t, tau, n_tau, n).size();
    return cells;
  }());

  const auto t0 = Clock::now();
  const auto serial = dacs::underrep_reward_table(counts, grid, tau, n_tau,
                                                  alpha, n, m);
  const auto t1 = Clock::now();
  const auto parallel = dacs::underrep_reward_table_parallel(
      counts, grid, tau, n_tau, alpha, n, m);
  const auto t2 = Clock::now();

  bool identical = serial.values.size() == parallel.values.size();
  for (std::size_t q = 0; identical && q < serial.values.size(); ++q)
    identical = 0 == std::memcmp(serial.values[q].data(),
                                 parallel.values[q].data(),
                                 serial.values[q].size() * sizeof(double));

#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  std::printf("serial   %.3f s\n", secs(t0, t1));
  std::printf("openmp   %.3f s  (%d threads, speedup %.2fx)\n", secs(t1, t2),
              threads, secs(t0, t1) / secs(t1, t2));
  std::printf("tables bit-identical: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
