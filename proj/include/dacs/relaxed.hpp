#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "dacs/diversity.hpp"
#include "dacs/qp.hpp"
#include "dacs/score_state.hpp"
#include "dacs/stopping.hpp"

namespace dacs {

enum class RelaxKind { kSharpe, kMarkowitz };

// One relaxed e-value optimization program, restricted to the coordinates
// with positive e-values (all equal to beta).
struct RelaxedProgram {
  RelaxKind kind = RelaxKind::kMarkowitz;
  double beta = 0.0;   // common positive e-value
  double alpha = 0.1;
  int m_total = 0;     // m in the self-consistency constraint
  double gamma = 1.0;  // Markowitz weight
  Eigen::MatrixXd sigma;  // similarity over the active coordinates

  double kappa() const { return alpha * beta / m_total; }
};

struct RelaxedSolution {
  Eigen::VectorXd chi;      // over the program's active coordinates
  double objective = 0.0;   // relaxed diversity value at chi
  int iterations = 0;
  bool feasible = false;    // nonzero RSC point exists
};

// Maximize the relaxed diversity over the RSC set. Markowitz solves the
// quadratic program directly; Sharpe minimizes chi' S chi on the capped
// simplex and rescales the solution to unit max-norm. Infeasible programs
// return chi = 0.
RelaxedSolution solve_relaxed(const RelaxedProgram& program,
                              const std::optional<Eigen::VectorXd>& warm_start,
                              const PgdConfig& config);

// Step a membership vector from B(t+1, s) to B(t, s+1): drop the last bit;
// if it was 0, flip one uniformly chosen 1 in the prefix. Returns the flipped
// index or -1. Preserves uniformity.
int couple_down(std::vector<std::uint8_t>& b, std::mt19937_64& rng);

// Relaxed optimal value at time t under membership b: solve the RSC program
// over the active sorted positions and return the expected diversity of its
// Bernoulli rounding (closed form for Markowitz, MC for Sharpe).
// sigma_sorted is the pooled similarity permuted into sorted-score order.
// A full-length warm vector (size t, zeros on calibration coordinates) may be
// supplied; solution_out receives the embedded solution for chaining.
double relaxed_opt_value(int t, const std::vector<std::uint8_t>& b,
                         const DiversityMetric& metric,
                         const Eigen::MatrixXd& sigma_sorted, double alpha,
                         int n, int m, int rounding_draws, std::uint64_t seed,
                         const PgdConfig& config,
                         const std::optional<Eigen::VectorXd>& warm_full = {},
                         Eigen::VectorXd* solution_out = nullptr);

struct PathCell {
  int grid_index = 0;  // into grid.times
  int t = 0;
  int s = 0;
};

// Diagonal warm-start paths: every (grid time, support point) cell appears in
// exactly one path; within a path t decreases and s increases in lockstep,
// matching the coupled membership updates.
std::vector<std::vector<PathCell>> warm_start_schedule(const TimeGrid& grid,
                                                       int tau_bh, int n_tau,
                                                       int n);

// Monte-Carlo reward table for a relaxable metric over the grid, using
// coupled samples and warm starts along the diagonal paths (or independent
// cell-wise sampling when warm_start is off). Deterministic for a fixed seed
// under any thread count.
StageTable relaxed_reward_table(const ScoreState& state,
                                const Eigen::MatrixXd& sigma_sorted,
                                const DiversityMetric& metric,
                                const TimeGrid& grid, int tau_bh, double alpha,
                                int mc_draws, int rounding_draws,
                                bool warm_start, std::uint64_t seed,
                                bool parallel, const PgdConfig& config);

// Independent Bernoulli(chi_i) rounding; returns selected indices.
std::vector<int> randomized_round(const Eigen::VectorXd& chi,
                                  std::mt19937_64& rng);

}  // namespace dacs
