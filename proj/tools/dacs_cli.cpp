// Command-line front end: run selections on CSV data, generate simulation
// sweeps, and sanity-check the numerical kernels against brute force.

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <random>

#include "dacs/csv.hpp"
#include "dacs/eval.hpp"
#include "dacs/pipeline.hpp"
#include "dacs/sim.hpp"
#include "dacs/testing/oracles.hpp"
#include "dacs/underrep.hpp"

using json = nlohmann::json;

namespace {

struct MetricOpts {
  std::string metric = "underrep";
  double gamma = -1.0;  // <= 0 means "use 2/lambda_max"
  std::string sim_matrix_path;
  double bandwidth = -1.0;
  int categories = 0;  // 0 = infer from labels
};

dacs::DiversityMetric build_metric(
    const MetricOpts& opts, const std::vector<dacs::CalibrationSample>& calib,
    const std::vector<dacs::TestSample>& test, int n_labels) {
  if (opts.metric == "underrep") {
    const int C = opts.categories > 0 ? opts.categories : n_labels;
    if (C < 2)
      throw dacs::BadInput("underrep metric needs at least 2 categories");
    return dacs::Underrep{C};
  }
  std::shared_ptr<const dacs::SimilarityMatrix> sigma;
  if (!opts.sim_matrix_path.empty()) {
    auto mat = dacs::read_matrix_csv(opts.sim_matrix_path);
    sigma = std::make_shared<dacs::SimilarityMatrix>(
        dacs::SimilarityMatrix::from_dense(std::move(mat), true));
  } else {
    std::vector<std::vector<double>> z;
    for (const auto& c : calib) z.push_back(c.z.coords);
    for (const auto& t : test) z.push_back(t.z.coords);
    for (const auto& v : z)
      if (v.empty())
        throw dacs::BadInput(
            "sharpe/markowitz need vector z or --sim-matrix");
    sigma = std::make_shared<dacs::SimilarityMatrix>(dacs::rbf_similarity(
        z, opts.bandwidth > 0 ? std::optional<double>(opts.bandwidth)
                              : std::nullopt));
  }
  if (opts.metric == "sharpe") return dacs::Sharpe{sigma};
  if (opts.metric == "markowitz") {
    const double gamma =
        opts.gamma > 0 ? opts.gamma : dacs::markowitz_gamma_hint(*sigma);
    return dacs::Markowitz{sigma, gamma};
  }
  throw dacs::BadInput("unknown metric '" + opts.metric + "'");
}

json result_to_json(const dacs::SelectionResult& res) {
  json j;
  j["selected"] = res.selected;
  j["n_selected"] = res.selected.size();
  j["tau_star"] = res.tau_star;
  j["tau_bh"] = res.diagnostics.tau_bh;
  j["cs_set"] = res.diagnostics.cs_set;
  j["diversity"] = res.diagnostics.diversity;
  if (res.e_values.denom > 0) {
    j["e_value_denom"] = res.e_values.denom;
    j["e_values"] = res.e_values.values;
  }
  if (res.chi.has_value()) {
    j["chi"] = std::vector<double>(
        res.chi->chi.data(), res.chi->chi.data() + res.chi->chi.size());
    j["chi_objective"] = res.chi->objective;
    j["chi_feasible"] = res.chi->feasible;
    j["solver_iterations"] = res.chi->iterations;
  }
  j["reward_seconds"] = res.diagnostics.reward_seconds;
  j["total_seconds"] = res.diagnostics.total_seconds;
  return j;
}

void write_output(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << std::endl;
  } else {
    std::ofstream out(out_path);
    if (!out) throw dacs::BadInput("cannot write " + out_path);
    out << j.dump(2) << "\n";
  }
}

std::vector<double> parse_alpha_grid(const std::string& s) {
  std::vector<double> alphas;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    alphas.push_back(std::stod(tok));
  }
  if (alphas.empty()) throw dacs::BadInput("empty alpha grid");
  return alphas;
}

// Per-time relaxed solutions over the test units for the baseline CDF.
std::vector<Eigen::VectorXd> per_time_chis(const dacs::ScoreState& state,
                                           const dacs::DiversityMetric& metric,
                                           double alpha, int tau_bh) {
  std::vector<Eigen::VectorXd> chis;
  const auto& sigma = std::holds_alternative<dacs::Sharpe>(metric)
                          ? *std::get<dacs::Sharpe>(metric).sigma
                          : *std::get<dacs::Markowitz>(metric).sigma;
  dacs::PgdConfig cfg;
  for (int t = 1; t <= tau_bh; ++t) {
    std::vector<int> active, pooled;
    for (int i = 0; i < state.m; ++i)
      if (state.test_rank[i] <= t) {
        active.push_back(i);
        pooled.push_back(state.n + i);
      }
    dacs::RelaxedProgram prog;
    prog.kind = std::holds_alternative<dacs::Sharpe>(metric)
                    ? dacs::RelaxKind::kSharpe
                    : dacs::RelaxKind::kMarkowitz;
    prog.beta = (state.n + 1.0) / (1.0 + state.n - state.calib_above[t]);
    prog.alpha = alpha;
    prog.m_total = state.m;
    if (const auto* mk = std::get_if<dacs::Markowitz>(&metric))
      prog.gamma = mk->gamma;
    prog.sigma = sigma.submatrix(pooled);
    const dacs::RelaxedSolution sol =
        dacs::solve_relaxed(prog, std::nullopt, cfg);
    Eigen::VectorXd chi = Eigen::VectorXd::Zero(state.m);
    for (std::size_t k = 0; k < active.size(); ++k)
      chi[active[k]] = sol.chi[k];
    chis.push_back(std::move(chi));
  }
  return chis;
}

int run_simulate(const std::string& setting_id, int reps,
                 const std::vector<double>& alphas, int n, int m, int n_train,
                 const MetricOpts& mopts, const std::string& mode,
                 int mc_draws, int grid_q, int rounding_draws, bool warm,
                 std::uint64_t seed, int normalize_draws,
                 const std::string& out_dir, bool serial) {
  const dacs::SimSetting setting = dacs::sim_setting(setting_id, n, m, n_train);
  dacs::EvalReport report;
  report.rows.resize(static_cast<std::size_t>(reps) * alphas.size() * 2);

  const long jobs = static_cast<long>(reps) * alphas.size();
#pragma omp parallel for schedule(dynamic) if (!serial)
  for (long job = 0; job < jobs; ++job) {
    const int rep = static_cast<int>(job / alphas.size());
    const double alpha = alphas[job % alphas.size()];
    const std::uint64_t rep_seed =
        dacs::derive_seed(seed, dacs::Stream::kSimulate, rep, 7777);
    const dacs::SimData data =
        dacs::simulate_with_predictor(setting, rep_seed);

    dacs::DiversityMetric metric =
        build_metric(mopts, data.calib, data.test, setting.C);

    dacs::DacsConfig cfg;
    cfg.alpha = alpha;
    cfg.metric = metric;
    cfg.seed = rep_seed;
    cfg.parallel = false;  // replicates already occupy the threads
    if (mode == "exact")
      cfg.mode = dacs::ExactUnderrepMode{grid_q};
    else
      cfg.mode = dacs::RelaxedMcMode{mc_draws, grid_q, rounding_draws, warm};

    const dacs::SelectionResult dacs_res =
        dacs::run_dacs(data.calib, data.test, cfg);
    const dacs::SelectionResult cs_res =
        dacs::run_cs(data.calib, data.test, alpha, metric);

    std::vector<double> baseline;
    if (normalize_draws > 0 && mode != "exact" &&
        dacs_res.diagnostics.tau_bh > 0) {
      const dacs::ScoreState state =
          dacs::build_score_state(data.calib, data.test);
      const auto chis =
          per_time_chis(state, metric, alpha, dacs_res.diagnostics.tau_bh);
      baseline = dacs::baseline_diversity_draws(
          chis, metric, data.test, state.n, normalize_draws, rep_seed);
    }

    auto fill = [&](const dacs::SelectionResult& r, const char* name,
                    std::size_t slot) {
      dacs::EvalRow row;
      row.replicate = rep;
      row.alpha = alpha;
      row.method = name;
      const auto [fdp, power] = dacs::fdp_and_power(r.selected, data.truth_y);
      row.fdp = fdp;
      row.power = power;
      row.diversity = r.diagnostics.diversity;
      row.nonempty = !r.selected.empty();
      row.n_selected = static_cast<int>(r.selected.size());
      row.tau_star = r.tau_star;
      row.seconds = r.diagnostics.total_seconds;
      if (!baseline.empty())
        row.normalized_diversity =
            dacs::baseline_cdf_normalize(r.diagnostics.diversity, baseline);
      report.rows[slot] = std::move(row);
    };
    fill(dacs_res, "dacs", 2 * job);
    fill(cs_res, "cs", 2 * job + 1);
  }

  const std::string prefix =
      out_dir.empty() ? std::string(".") : out_dir;
  report.write_csv(prefix + "/report_" + setting_id + ".csv");
  dacs::EvalReport::write_summary_csv(prefix + "/summary_" + setting_id +
                                          ".csv",
                                      report.summarize());
  for (const auto& s : report.summarize()) {
    std::cout << s.method << " alpha=" << s.alpha << " fdr=" << s.fdr
              << " (se " << s.fdr_se << ") power=" << s.power
              << " diversity|nonempty=" << s.diversity_nonempty
              << " mean|R|=" << s.mean_selected << "\n";
  }
  return 0;
}

int run_validate(std::uint64_t seed) {
  using namespace dacs;
  int failures = 0;
  auto check = [&](bool ok, const std::string& name) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
  };
  std::mt19937_64 rng(seed);

  {  // survival vs enumeration
    bool ok = true;
    std::uniform_int_distribution<int> csize(2, 4), pop(0, 12);
    for (int it = 0; it < 60 && ok; ++it) {
      const int C = csize(rng);
      std::vector<int> counts(C);
      int total = 0;
      for (auto& c : counts) total += (c = pop(rng));
      if (total == 0) continue;
      std::uniform_int_distribution<int> dd(0, total);
      const int draws = dd(rng);
      const int numax = std::max(1, *std::min_element(counts.begin(),
                                                      counts.end()));
      const auto s = min_survival_fft(counts, draws, numax);
      for (int nu = 1; nu <= numax; ++nu)
        ok = ok && std::fabs(s[nu - 1] - testing::min_survival_enum(
                                             counts, draws, nu)) < 1e-9;
    }
    check(ok, "minimum-survival FFT vs exhaustive enumeration");
  }

  {  // greedy vs exhaustive subsets
    bool ok = true;
    std::uniform_int_distribution<int> nn(2, 8), mm(2, 8), cc(2, 3);
    std::uniform_real_distribution<double> mu(-1, 1), aa(0.15, 0.7);
    std::bernoulli_distribution pos(0.5);
    for (int it = 0; it < 150 && ok; ++it) {
      const int n = nn(rng), m = mm(rng), C = cc(rng);
      std::vector<CalibrationSample> calib(n);
      std::vector<TestSample> test(m);
      std::uniform_int_distribution<int> zz(1, C);
      for (auto& c : calib)
        c = {ZValue::cat(zz(rng)), mu(rng), pos(rng) ? 1.0 : -1.0};
      std::vector<int> cats(m);
      for (int i = 0; i < m; ++i) {
        test[i] = {ZValue::cat(zz(rng)), mu(rng)};
        cats[i] = test[i].z.category;
      }
      const double alpha = aa(rng);
      ScoreState st;
      try {
        st = build_score_state(calib, test);
      } catch (const DuplicateFiniteScore&) {
        continue;
      }
      std::uniform_int_distribution<int> tt(1, n + m);
      const int t = tt(rng);
      const auto sel = greedy_underrep_select(st, t, alpha, C);
      const double got = eval_set(Underrep{C}, sel, cats);
      const double want = testing::exhaustive_selfconsistent_optimum(
          st, t, alpha, Underrep{C}, cats);
      ok = ok && std::fabs(got - want) < 1e-12 &&
           is_self_consistent(sel, e_values_at(st, t), alpha, m);
    }
    check(ok, "greedy underrepresentation optimizer vs exhaustive search");
  }

  {  // snell envelope vs history-tree oracle
    bool ok = true;
    std::uniform_int_distribution<int> tb(1, 9), nn(1, 9);
    std::uniform_real_distribution<double> rw(-1, 1);
    for (int it = 0; it < 40 && ok; ++it) {
      const int tau = tb(rng);
      const int n = nn(rng);
      std::uniform_int_distribution<int> ntau(std::max(0, n - tau), n);
      const int ntau_v = ntau(rng);
      StageTable rewards =
          StageTable::shaped(full_grid(tau), tau, ntau_v, n);
      for (std::size_t q = 0; q < rewards.values.size(); ++q)
        for (auto& v : rewards.values[q]) v = rw(rng);
      const StageTable env = snell_envelope(rewards, n);
      testing::SnellTreeOracle oracle(
          [&](int t, int s) { return rewards.at(t - 1, s); }, n);
      for (int t = 1; t <= tau && ok; ++t) {
        const auto sup = support_range(t, tau, ntau_v, n);
        for (int s = sup.lo; s <= sup.hi; ++s)
          ok = ok && std::fabs(env.at(t - 1, s) - oracle.value(t, s)) < 1e-10;
      }
    }
    check(ok, "Snell envelope vs history-tree induction");
  }

  {  // projections
    bool ok = true;
    std::uniform_int_distribution<int> dd(1, 6);
    std::uniform_real_distribution<double> yy(-1.5, 2.5), kk(0.05, 1.2);
    for (int it = 0; it < 120 && ok; ++it) {
      const int d = dd(rng);
      Eigen::VectorXd y(d);
      for (int i = 0; i < d; ++i) y[i] = yy(rng);
      const double kappa = kk(rng);
      const Eigen::VectorXd x = project_rsc(y, kappa);
      const Eigen::VectorXd ref = testing::grid_project_rsc(y, kappa);
      ok = ok && (x - ref).norm() < 1e-6;
      const double total = x.sum();
      for (int i = 0; i < d; ++i)
        ok = ok && x[i] >= -1e-12 && x[i] <= 1.0 + 1e-12 &&
             x[i] <= kappa * total + 1e-12;
    }
    check(ok, "RSC projection vs grid-over-s oracle");
  }

  std::cout << (failures == 0 ? "validate: all checks passed"
                              : "validate: FAILURES PRESENT")
            << std::endl;
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diversity-aware conformal selection"};
  app.require_subcommand(1);

  // --- select ---
  auto* sel = app.add_subcommand("select", "Run the diversity-aware selector");
  std::string calib_path, test_path, out_path, mode = "auto";
  double alpha = 0.1;
  MetricOpts mopts;
  std::uint64_t seed = 1;
  int mc_draws = 300, grid_q = 0, rounding_draws = 50;
  bool no_warm = false, jitter = false, keep_tables = false, serial = false;
  sel->add_option("--calib", calib_path, "calibration CSV")->required();
  sel->add_option("--test", test_path, "test CSV")->required();
  sel->add_option("--alpha", alpha, "nominal FDR level")->required();
  sel->add_option("--metric", mopts.metric,
                  "underrep | sharpe | markowitz");
  sel->add_option("--gamma", mopts.gamma, "Markowitz gamma (default 2/lmax)");
  sel->add_option("--sim-matrix", mopts.sim_matrix_path,
                  "similarity CSV over calib+test rows");
  sel->add_option("--bandwidth", mopts.bandwidth, "RBF bandwidth");
  sel->add_option("--categories", mopts.categories, "underrep category count");
  sel->add_option("--mode", mode, "auto | exact | relaxed");
  sel->add_option("--mc-draws", mc_draws, "MC samples per reward cell");
  sel->add_option("--grid", grid_q, "coarse grid size (0 = full)");
  sel->add_option("--rounding-draws", rounding_draws,
                  "Sharpe rounding MC draws");
  sel->add_flag("--no-warm-start", no_warm, "disable warm starts");
  sel->add_flag("--jitter", jitter, "break score ties with seeded noise");
  sel->add_flag("--tables", keep_tables, "dump reward/Snell tables");
  sel->add_flag("--serial", serial, "single-threaded");
  sel->add_option("--seed", seed, "master seed");
  sel->add_option("--out", out_path, "output JSON path (default stdout)");

  // --- cs ---
  auto* cs = app.add_subcommand("cs", "Conformal selection baseline");
  std::string cs_calib, cs_test, cs_out;
  double cs_alpha = 0.1;
  MetricOpts cs_mopts;
  cs->add_option("--calib", cs_calib, "calibration CSV")->required();
  cs->add_option("--test", cs_test, "test CSV")->required();
  cs->add_option("--alpha", cs_alpha, "nominal FDR level")->required();
  cs->add_option("--metric", cs_mopts.metric, "diversity metric to report");
  cs->add_option("--gamma", cs_mopts.gamma, "Markowitz gamma");
  cs->add_option("--sim-matrix", cs_mopts.sim_matrix_path, "similarity CSV");
  cs->add_option("--categories", cs_mopts.categories, "category count");
  cs->add_option("--out", cs_out, "output JSON path");

  // --- simulate ---
  auto* sim = app.add_subcommand("simulate", "Replicated simulation sweep");
  std::string setting_id = "u1", alpha_grid = "0.1,0.2,0.35", out_dir = ".";
  int reps = 100, sim_n = -1, sim_m = -1, sim_train = -1, normalize = 0;
  MetricOpts sim_mopts;
  std::string sim_mode = "auto";
  std::uint64_t sim_seed = 1;
  int sim_mc = 50, sim_grid = 10, sim_round = 50;
  bool sim_serial = false, sim_nowarm = false;
  sim->add_option("--setting", setting_id, "u1..u6 | s1..s4")->required();
  sim->add_option("--reps", reps, "replicates");
  sim->add_option("--alpha-grid", alpha_grid, "comma-separated alphas");
  sim->add_option("--n", sim_n, "calibration size");
  sim->add_option("--m", sim_m, "test size");
  sim->add_option("--train", sim_train, "training size");
  sim->add_option("--metric", sim_mopts.metric, "metric (default by family)");
  sim->add_option("--gamma", sim_mopts.gamma, "Markowitz gamma");
  sim->add_option("--mode", sim_mode, "auto | exact | relaxed");
  sim->add_option("--mc-draws", sim_mc, "L");
  sim->add_option("--grid", sim_grid, "Q");
  sim->add_option("--rounding-draws", sim_round, "Sharpe rounding draws");
  sim->add_flag("--no-warm-start", sim_nowarm, "disable warm starts");
  sim->add_option("--normalize", normalize,
                  "baseline-CDF rounding reps (0 = off)");
  sim->add_option("--seed", sim_seed, "master seed");
  sim->add_option("--out-dir", out_dir, "output directory");
  sim->add_flag("--serial", sim_serial, "single-threaded");

  // --- validate ---
  auto* val = app.add_subcommand("validate", "Run brute-force cross-checks");
  std::uint64_t val_seed = 20250810;
  val->add_option("--seed", val_seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(sel)) {
      std::vector<std::string> labels;
      auto ct = dacs::read_calibration_csv(calib_path, &labels);
      auto tt = dacs::read_test_csv(test_path, &labels);
      const auto metric = build_metric(mopts, ct.calib, tt.test,
                                       static_cast<int>(labels.size()));
      dacs::DacsConfig cfg;
      cfg.alpha = alpha;
      cfg.metric = metric;
      cfg.seed = seed;
      cfg.parallel = !serial;
      cfg.keep_tables = keep_tables;
      if (jitter) cfg.jitter_seed = seed;
      const bool exact =
          (mode == "exact") || (mode == "auto" && mopts.metric == "underrep");
      if (exact)
        cfg.mode = dacs::ExactUnderrepMode{grid_q};
      else
        cfg.mode =
            dacs::RelaxedMcMode{mc_draws, grid_q, rounding_draws, !no_warm};
      const auto res = dacs::run_dacs(ct.calib, tt.test, cfg);
      json j = result_to_json(res);
      j["method"] = "dacs";
      j["alpha"] = alpha;
      j["metric"] = mopts.metric;
      write_output(j, out_path);
      return 0;
    }
    if (app.got_subcommand(cs)) {
      std::vector<std::string> labels;
      auto ct = dacs::read_calibration_csv(cs_calib, &labels);
      auto tt = dacs::read_test_csv(cs_test, &labels);
      const auto metric = build_metric(cs_mopts, ct.calib, tt.test,
                                       static_cast<int>(labels.size()));
      const auto res = dacs::run_cs(ct.calib, tt.test, cs_alpha, metric);
      json j = result_to_json(res);
      j["method"] = "cs";
      j["alpha"] = cs_alpha;
      write_output(j, cs_out);
      return 0;
    }
    if (app.got_subcommand(sim)) {
      if (sim_mopts.metric == "underrep" && setting_id[0] == 's')
        sim_mopts.metric = "sharpe";
      if (sim_mode == "auto")
        sim_mode = sim_mopts.metric == "underrep" ? "exact" : "relaxed";
      return run_simulate(setting_id, reps, parse_alpha_grid(alpha_grid),
                          sim_n, sim_m, sim_train, sim_mopts, sim_mode,
                          sim_mc, sim_grid, sim_round, !sim_nowarm, sim_seed,
                          normalize, out_dir, sim_serial);
    }
    if (app.got_subcommand(val)) return run_validate(val_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 2;
}
