#include "dacs/pipeline.hpp"

#include <chrono>

#include "dacs/underrep.hpp"

namespace dacs {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

const SimilarityMatrix& metric_sigma(const DiversityMetric& metric) {
  if (const auto* sh = std::get_if<Sharpe>(&metric)) return *sh->sigma;
  if (const auto* mk = std::get_if<Markowitz>(&metric)) return *mk->sigma;
  throw BadInput("metric has no similarity matrix");
}

}  // namespace

Eigen::MatrixXd sigma_in_sorted_order(const SimilarityMatrix& sigma,
                                      const ScoreState& state) {
  const int total = state.size();
  if (sigma.dim() != total)
    throw BadInput("similarity matrix must cover all n+m samples");
  Eigen::MatrixXd out(total, total);
  for (int a = 0; a < total; ++a)
    for (int b = 0; b < total; ++b)
      out(a, b) = sigma.entries()(state.sort_perm[a], state.sort_perm[b]);
  return out;
}

double selection_diversity(const DiversityMetric& metric,
                           const std::vector<int>& selected,
                           const std::vector<TestSample>& test, int n) {
  if (std::holds_alternative<Underrep>(metric)) {
    std::vector<int> cats(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
      if (!test[i].z.is_categorical())
        throw BadInput("underrepresentation index needs categorical z");
      cats[i] = test[i].z.category;
    }
    return eval_set(metric, selected, cats);
  }
  std::vector<int> pooled(selected.size());
  for (std::size_t k = 0; k < selected.size(); ++k)
    pooled[k] = n + selected[k];
  return eval_set(metric, pooled, {});
}

SelectionResult run_dacs(const std::vector<CalibrationSample>& calib,
                         const std::vector<TestSample>& test,
                         const DacsConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  if (config.alpha <= 0.0 || config.alpha >= 1.0)
    throw BadInput("run_dacs: alpha in (0,1)");
  const ScoreState state = build_score_state(calib, test, config.jitter_seed);
  const int n = state.n, m = state.m;
  const double alpha = config.alpha;

  SelectionResult res;
  res.diagnostics.cs_set = cs_selection(state, alpha);
  const int tau_bh = bh_stopping_time(state, alpha);
  res.diagnostics.tau_bh = tau_bh;
  if (tau_bh == 0) {
    res.tau_star = 0;
    res.diagnostics.diversity =
        selection_diversity(config.metric, {}, test, n);
    res.diagnostics.total_seconds = seconds_since(t0);
    return res;
  }
  const int n_tau = state.calib_above[tau_bh];

  const bool exact = std::holds_alternative<ExactUnderrepMode>(config.mode);
  const int grid_q = exact ? std::get<ExactUnderrepMode>(config.mode).grid_q
                           : std::get<RelaxedMcMode>(config.mode).grid_q;
  const TimeGrid grid =
      (grid_q >= 2) ? build_grid(tau_bh, grid_q) : full_grid(tau_bh);

  const auto t_reward = std::chrono::steady_clock::now();
  StageTable rewards;
  if (exact) {
    const int C = underrep_categories(config.metric);
    if (C < 2) throw BadInput("ExactUnderrep mode needs an Underrep metric");
    const CategoryCounts counts = category_counts(state, C);
    rewards = config.parallel
                  ? underrep_reward_table_parallel(counts, grid, tau_bh, n_tau,
                                                   alpha, n, m)
                  : underrep_reward_table(counts, grid, tau_bh, n_tau, alpha,
                                          n, m);
  } else {
    const auto& mode = std::get<RelaxedMcMode>(config.mode);
    if (!is_relaxable(config.metric))
      throw UnsupportedRelaxation("RelaxedMC mode needs Sharpe or Markowitz");
    const Eigen::MatrixXd sigma_sorted =
        sigma_in_sorted_order(metric_sigma(config.metric), state);
    PgdConfig cell_cfg;
    cell_cfg.max_iters = 20000;
    rewards = relaxed_reward_table(
        state, sigma_sorted, config.metric, grid, tau_bh, alpha,
        mode.mc_draws, mode.rounding_draws, mode.warm_start, config.seed,
        config.parallel, cell_cfg);
  }
  res.diagnostics.reward_seconds = seconds_since(t_reward);

  const StageTable snell =
      grid.unit_gap() ? snell_envelope(rewards, n) : coarse_snell(rewards, n);
  const int tau_star =
      optimal_stopping_time(rewards, snell, state.calib_above);
  res.tau_star = tau_star;
  res.e_values = e_values_at(state, tau_star);

  if (exact) {
    const int C = underrep_categories(config.metric);
    res.selected = greedy_underrep_select(state, tau_star, alpha, C);
  } else {
    // Final e-value optimization over the test units, cold started at a
    // tightened tolerance, then Bernoulli rounding.
    std::vector<int> active;
    for (int i = 0; i < m; ++i)
      if (state.test_rank[i] <= tau_star) active.push_back(i);
    RelaxedProgram prog;
    prog.kind = std::holds_alternative<Sharpe>(config.metric)
                    ? RelaxKind::kSharpe
                    : RelaxKind::kMarkowitz;
    prog.beta = (n + 1.0) / (1.0 + n - state.calib_above[tau_star]);
    prog.alpha = alpha;
    prog.m_total = m;
    if (const auto* mk = std::get_if<Markowitz>(&config.metric))
      prog.gamma = mk->gamma;
    const SimilarityMatrix& sigma = metric_sigma(config.metric);
    std::vector<int> pooled(active.size());
    for (std::size_t k = 0; k < active.size(); ++k)
      pooled[k] = n + active[k];
    prog.sigma = sigma.submatrix(pooled);

    PgdConfig final_cfg;
    final_cfg.tol = 1e-10;
    final_cfg.max_iters = 100000;
    const RelaxedSolution sol = solve_relaxed(prog, std::nullopt, final_cfg);

    RelaxedSolution embedded;
    embedded.chi = Eigen::VectorXd::Zero(m);
    for (std::size_t k = 0; k < active.size(); ++k)
      embedded.chi[active[k]] = sol.chi[k];
    embedded.objective = sol.objective;
    embedded.iterations = sol.iterations;
    embedded.feasible = sol.feasible;

    auto rng = make_engine(config.seed, Stream::kRounding);
    res.selected = randomized_round(embedded.chi, rng);
    res.chi = std::move(embedded);
  }

  res.diagnostics.diversity =
      selection_diversity(config.metric, res.selected, test, n);
  if (config.keep_tables) {
    res.diagnostics.rewards = rewards;
    res.diagnostics.snell = snell;
  }
  res.diagnostics.total_seconds = seconds_since(t0);
  return res;
}

SelectionResult run_cs(const std::vector<CalibrationSample>& calib,
                       const std::vector<TestSample>& test, double alpha,
                       const DiversityMetric& metric,
                       std::optional<std::uint64_t> jitter_seed) {
  const auto t0 = std::chrono::steady_clock::now();
  if (alpha <= 0.0 || alpha >= 1.0) throw BadInput("run_cs: alpha in (0,1)");
  const ScoreState state = build_score_state(calib, test, jitter_seed);
  SelectionResult res;
  const int tau_bh = bh_stopping_time(state, alpha);
  res.tau_star = tau_bh;
  res.selected = cs_selection(state, alpha);
  res.diagnostics.cs_set = res.selected;
  res.diagnostics.tau_bh = tau_bh;
  if (tau_bh > 0) res.e_values = e_values_at(state, tau_bh);
  res.diagnostics.diversity =
      selection_diversity(metric, res.selected, test, state.n);
  res.diagnostics.total_seconds = seconds_since(t0);
  return res;
}

}  // namespace dacs
