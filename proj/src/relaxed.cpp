#include "dacs/relaxed.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dacs {

RelaxedSolution solve_relaxed(const RelaxedProgram& program,
                              const std::optional<Eigen::VectorXd>& warm_start,
                              const PgdConfig& config) {
  const int p = static_cast<int>(program.sigma.rows());
  RelaxedSolution sol;
  sol.chi = Eigen::VectorXd::Zero(p);
  sol.feasible =
      feasibility_check(program.beta, p, program.alpha, program.m_total);
  if (!sol.feasible) {
    sol.objective = 0.0;
    return sol;
  }

  const double kappa = program.kappa();
  const Eigen::MatrixXd& S = program.sigma;

  if (program.kind == RelaxKind::kMarkowitz) {
    const double gamma = program.gamma;
    GradFn grad = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return gamma * (S * x) - Eigen::VectorXd::Ones(p);
    };
    ObjFn obj = [&](const Eigen::VectorXd& x) {
      return 0.5 * gamma * x.dot(S * x) - x.sum();
    };
    ProjFn proj = [&](const Eigen::VectorXd& x) {
      return project_rsc(x, kappa);
    };
    Eigen::VectorXd x0 =
        warm_start.value_or(Eigen::VectorXd::Ones(p));
    const PgdResult res = pgd_minimize(grad, obj, proj, x0, config);
    sol.chi = res.x;
    sol.iterations = res.iterations;
    sol.objective = -res.objective;
    return sol;
  }

  // Sharpe: min chi' S chi on {0 <= chi <= min(kappa,1), 1'chi = 1}, then
  // rescale to unit max-norm (largest expected selection count among optima).
  const Eigen::VectorXd cap =
      Eigen::VectorXd::Constant(p, std::min(kappa, 1.0));
  GradFn grad = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return 2.0 * (S * x);
  };
  ObjFn obj = [&](const Eigen::VectorXd& x) { return x.dot(S * x); };
  ProjFn proj = [&](const Eigen::VectorXd& x) {
    return project_capped_simplex(x, cap, 1.0);
  };
  Eigen::VectorXd x0;
  if (warm_start.has_value()) {
    x0 = *warm_start;
    const double total = x0.sum();
    if (total > 0.0) x0 /= total;
  } else {
    x0 = Eigen::VectorXd::Constant(p, 1.0 / p);
  }
  const PgdResult res = pgd_minimize(grad, obj, proj, x0, config);
  Eigen::VectorXd chi = res.x;
  const double mx = chi.maxCoeff();
  if (mx > 0.0) chi /= mx;
  chi = chi.cwiseMin(1.0).cwiseMax(0.0);
  sol.chi = chi;
  sol.iterations = res.iterations;
  const double quad = chi.dot(S * chi);
  sol.objective = (quad > 0.0) ? chi.sum() / std::sqrt(quad) : 0.0;
  return sol;
}

int couple_down(std::vector<std::uint8_t>& b, std::mt19937_64& rng) {
  if (b.empty()) throw BadInput("couple_down: empty vector");
  const bool last = b.back() != 0;
  b.pop_back();
  if (last) return -1;
  int ones = 0;
  for (auto v : b) ones += (v != 0);
  if (ones == 0)
    throw NoFlippableOne("couple_down: no 1 to flip in the prefix");
  std::uniform_int_distribution<int> pick(1, ones);
  int target = pick(rng);
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (b[j]) {
      if (--target == 0) {
        b[j] = 0;
        return static_cast<int>(j);
      }
    }
  }
  throw NoFlippableOne("couple_down: internal miscount");
}

namespace {

RelaxKind kind_of(const DiversityMetric& metric) {
  if (std::holds_alternative<Sharpe>(metric)) return RelaxKind::kSharpe;
  if (std::holds_alternative<Markowitz>(metric)) return RelaxKind::kMarkowitz;
  throw UnsupportedRelaxation("metric has no relaxed path");
}

double gamma_of(const DiversityMetric& metric) {
  if (const auto* mk = std::get_if<Markowitz>(&metric)) return mk->gamma;
  return 1.0;
}

}  // namespace

double relaxed_opt_value(int t, const std::vector<std::uint8_t>& b,
                         const DiversityMetric& metric,
                         const Eigen::MatrixXd& sigma_sorted, double alpha,
                         int n, int m, int rounding_draws, std::uint64_t seed,
                         const PgdConfig& config,
                         const std::optional<Eigen::VectorXd>& warm_full,
                         Eigen::VectorXd* solution_out) {
  if (static_cast<int>(b.size()) != t)
    throw BadInput("relaxed_opt_value: membership length != t");
  std::vector<int> active;
  int ones = 0;
  for (int i = 0; i < t; ++i) {
    if (b[i])
      ++ones;
    else
      active.push_back(i);
  }
  if (solution_out) *solution_out = Eigen::VectorXd::Zero(t);
  if (active.empty()) return 0.0;

  RelaxedProgram prog;
  prog.kind = kind_of(metric);
  prog.beta = (n + 1.0) / (1.0 + ones);
  prog.alpha = alpha;
  prog.m_total = m;
  prog.gamma = gamma_of(metric);
  const int p = static_cast<int>(active.size());
  prog.sigma.resize(p, p);
  for (int a = 0; a < p; ++a)
    for (int c = 0; c < p; ++c)
      prog.sigma(a, c) = sigma_sorted(active[a], active[c]);

  std::optional<Eigen::VectorXd> warm;
  if (warm_full.has_value()) {
    Eigen::VectorXd w(p);
    for (int a = 0; a < p; ++a) w[a] = (*warm_full)[active[a]];
    warm = std::move(w);
  }

  const RelaxedSolution sol = solve_relaxed(prog, warm, config);
  if (solution_out)
    for (int a = 0; a < p; ++a) (*solution_out)[active[a]] = sol.chi[a];
  if (!sol.feasible) return 0.0;

  if (prog.kind == RelaxKind::kMarkowitz)
    return expected_rounded_markowitz(sol.chi, prog.sigma, prog.gamma);
  return expected_rounded_sharpe_mc(sol.chi, prog.sigma, rounding_draws, seed);
}

std::vector<std::vector<PathCell>> warm_start_schedule(const TimeGrid& grid,
                                                       int tau_bh, int n_tau,
                                                       int n) {
  std::vector<std::vector<PathCell>> paths;
  // Every cell (t, s) sits on exactly one diagonal t + s = d.
  for (int d = n; d <= tau_bh + n_tau; ++d) {
    std::vector<PathCell> path;
    for (int qi = grid.size() - 1; qi >= 0; --qi) {
      const int t = grid.times[qi];
      const int s = d - t;
      if (support_range(t, tau_bh, n_tau, n).contains(s))
        path.push_back({qi, t, s});
    }
    if (!path.empty()) paths.push_back(std::move(path));
  }
  return paths;
}

namespace {

struct ChainResult {
  // values[k] = relaxed optimal value at path cell k for one MC index
  std::vector<double> values;
};

ChainResult run_chain(const std::vector<PathCell>& path, int path_id, int ell,
                      const ScoreState& state,
                      const Eigen::MatrixXd& sigma_sorted,
                      const DiversityMetric& metric, double alpha,
                      int rounding_draws, bool warm_start, std::uint64_t seed,
                      const PgdConfig& config) {
  const int n = state.n, m = state.m;
  ChainResult out;
  out.values.resize(path.size());

  auto rng = make_engine(seed, Stream::kCoupling,
                         static_cast<std::uint64_t>(path_id),
                         static_cast<std::uint64_t>(ell));
  std::vector<std::uint8_t> b =
      sample_membership(path[0].t, n - path[0].s, rng);

  std::optional<Eigen::VectorXd> warm_full;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (k > 0) {
      // Walk the gap one position at a time; each flip also transports the
      // warm vector (the dropped test coordinate swaps onto the flipped one).
      for (int tt = path[k - 1].t; tt > path[k].t; --tt) {
        const int flipped = couple_down(b, rng);
        if (warm_full.has_value()) {
          if (flipped >= 0) (*warm_full)[flipped] = (*warm_full)[tt - 1];
          warm_full->conservativeResize(tt - 1);
        }
      }
    }
    const std::uint64_t cell_seed =
        derive_seed(seed, Stream::kSharpeRounding,
                    static_cast<std::uint64_t>(path[k].t),
                    static_cast<std::uint64_t>(path[k].s),
                    static_cast<std::uint64_t>(ell));
    Eigen::VectorXd sol_full;
    out.values[k] = relaxed_opt_value(
        path[k].t, b, metric, sigma_sorted, alpha, n, m, rounding_draws,
        cell_seed, config, warm_start ? warm_full : std::nullopt, &sol_full);
    if (warm_start) warm_full = std::move(sol_full);
  }
  return out;
}

}  // namespace

StageTable relaxed_reward_table(const ScoreState& state,
                                const Eigen::MatrixXd& sigma_sorted,
                                const DiversityMetric& metric,
                                const TimeGrid& grid, int tau_bh, double alpha,
                                int mc_draws, int rounding_draws,
                                bool warm_start, std::uint64_t seed,
                                bool parallel, const PgdConfig& config) {
  const int n = state.n;
  const int n_tau = state.calib_above[tau_bh];
  StageTable tab = StageTable::shaped(grid, tau_bh, n_tau, n);

  const auto paths = warm_start_schedule(grid, tau_bh, n_tau, n);
  const int P = static_cast<int>(paths.size());

  // One slot per (cell, mc index); filled in a fixed layout so the reduction
  // order never depends on the schedule.
  std::vector<std::vector<std::vector<double>>> slots(P);
  for (int p = 0; p < P; ++p)
    slots[p].assign(paths[p].size(), std::vector<double>(mc_draws, 0.0));

  const long jobs = static_cast<long>(P) * mc_draws;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long job = 0; job < jobs; ++job) {
    const int p = static_cast<int>(job / mc_draws);
    const int ell = static_cast<int>(job % mc_draws);
    const ChainResult r =
        run_chain(paths[p], p, ell, state, sigma_sorted, metric, alpha,
                  rounding_draws, warm_start, seed, config);
    for (std::size_t k = 0; k < paths[p].size(); ++k)
      slots[p][k][ell] = r.values[k];
  }

  for (int p = 0; p < P; ++p)
    for (std::size_t k = 0; k < paths[p].size(); ++k) {
      double acc = 0.0;
      for (int ell = 0; ell < mc_draws; ++ell) acc += slots[p][k][ell];
      tab.cell(paths[p][k].grid_index, paths[p][k].s) = acc / mc_draws;
    }
  return tab;
}

std::vector<int> randomized_round(const Eigen::VectorXd& chi,
                                  std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> out;
  for (int i = 0; i < chi.size(); ++i) {
    const double c = chi[i];
    if (c < 0.0 || c > 1.0 + 1e-12)
      throw BadInput("randomized_round: chi outside [0,1]");
    if (u(rng) < c) out.push_back(i);
  }
  return out;
}

}  // namespace dacs
