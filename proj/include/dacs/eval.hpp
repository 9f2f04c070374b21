#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "dacs/diversity.hpp"
#include "dacs/score_state.hpp"

namespace dacs {

// (FDP, power) against known responses: FDP counts selections with y <= 0,
// power counts recovered positives.
std::pair<double, double> fdp_and_power(const std::vector<int>& selected,
                                        const std::vector<double>& truth_y);

// Diversity values of D Bernoulli roundings of each per-time relaxed
// solution (each chi over the m test units).
std::vector<double> baseline_diversity_draws(
    const std::vector<Eigen::VectorXd>& per_time_chi,
    const DiversityMetric& metric, const std::vector<TestSample>& test, int n,
    int rounding_reps, std::uint64_t seed);

// Right-continuous empirical CDF position of `diversity_value` among the
// baseline draws; in [0,1].
double baseline_cdf_normalize(double diversity_value,
                              const std::vector<double>& baseline_draws);

struct EvalRow {
  int replicate = 0;
  double alpha = 0.0;
  std::string method;
  double fdp = 0.0;
  double power = 0.0;
  double diversity = 0.0;
  bool nonempty = false;
  int n_selected = 0;
  int tau_star = 0;
  double seconds = 0.0;
  double normalized_diversity = -1.0;  // < 0 when not computed
};

struct EvalSummary {
  std::string method;
  double alpha = 0.0;
  int reps = 0;
  double fdr = 0.0, fdr_se = 0.0;
  double power = 0.0, power_se = 0.0;
  double diversity_nonempty = 0.0, diversity_nonempty_se = 0.0;
  double mean_selected = 0.0;
  double empty_rate = 0.0;
  double mean_seconds = 0.0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::vector<EvalSummary> summarize() const;
  void write_csv(const std::string& path) const;
  static void write_summary_csv(const std::string& path,
                                const std::vector<EvalSummary>& summaries);
};

double mean(const std::vector<double>& v);
double standard_error(const std::vector<double>& v);

}  // namespace dacs
