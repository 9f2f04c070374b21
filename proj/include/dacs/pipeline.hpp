#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "dacs/conformal.hpp"
#include "dacs/diversity.hpp"
#include "dacs/relaxed.hpp"
#include "dacs/score_state.hpp"
#include "dacs/stopping.hpp"

namespace dacs {

// Exact path for the underrepresentation index. grid_q = 0 keeps the full
// time grid; >= 2 coarsens the reward/Snell computation.
struct ExactUnderrepMode {
  int grid_q = 0;
};

struct RelaxedMcMode {
  int mc_draws = 300;       // L
  int grid_q = 50;          // Q (0 = full grid)
  int rounding_draws = 50;  // Sharpe rounding MC inside rewards
  bool warm_start = true;
};

struct DacsConfig {
  double alpha = 0.1;
  DiversityMetric metric = Underrep{2};
  std::variant<ExactUnderrepMode, RelaxedMcMode> mode = ExactUnderrepMode{};
  std::uint64_t seed = 1;
  bool parallel = true;
  bool keep_tables = false;           // retain reward/Snell tables
  std::optional<std::uint64_t> jitter_seed;  // tie-breaking opt-in
};

struct Diagnostics {
  std::vector<int> cs_set;
  int tau_bh = 0;
  double diversity = 0.0;
  double reward_seconds = 0.0;
  double total_seconds = 0.0;
  std::optional<StageTable> rewards;
  std::optional<StageTable> snell;
};

struct SelectionResult {
  std::vector<int> selected;  // 0-based indices into the test samples
  int tau_star = 0;
  EValueVector e_values;
  std::optional<RelaxedSolution> chi;  // relaxed mode only (over test units)
  Diagnostics diagnostics;
};

SelectionResult run_dacs(const std::vector<CalibrationSample>& calib,
                         const std::vector<TestSample>& test,
                         const DacsConfig& config);

// Conformal selection baseline wrapped with the same diagnostics.
SelectionResult run_cs(const std::vector<CalibrationSample>& calib,
                       const std::vector<TestSample>& test, double alpha,
                       const DiversityMetric& metric,
                       std::optional<std::uint64_t> jitter_seed = {});

// Pooled similarity permuted into sorted-score order (calib rows first in the
// original ordering, then test rows).
Eigen::MatrixXd sigma_in_sorted_order(const SimilarityMatrix& sigma,
                                      const ScoreState& state);

// Diversity of a selected test subset under the metric (pooled indexing for
// similarity metrics, category labels for the underrepresentation index).
double selection_diversity(const DiversityMetric& metric,
                           const std::vector<int>& selected,
                           const std::vector<TestSample>& test, int n);

}  // namespace dacs
