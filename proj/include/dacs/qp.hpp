#pragma once

#include <Eigen/Dense>
#include <functional>

#include "dacs/common.hpp"

namespace dacs {

struct PgdConfig {
  int max_iters = 50000;
  double tol = 1e-9;          // relative objective change
  int tol_streak = 5;         // consecutive small changes required
  double initial_step = 1.0;
  double shrink = 0.5;        // backtracking factor
  bool adaptive_restart = true;
};

struct PgdResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  int restarts = 0;
};

using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using ObjFn = std::function<double(const Eigen::VectorXd&)>;
using ProjFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Accelerated projected gradient descent with backtracking line search and
// adaptive restarts. x0 is projected before use.
PgdResult pgd_minimize(const GradFn& grad, const ObjFn& objective,
                       const ProjFn& project, const Eigen::VectorXd& x0,
                       const PgdConfig& config);

// Euclidean projection onto {0 <= x <= cap, 1'x = total} by breakpoint
// search on the dual variable. Throws Infeasible if sum(cap) < total.
Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& cap,
                                       double total);

// Euclidean projection onto {0 <= x <= 1, x_i <= kappa 1'x for all i}.
// kappa >= 1 reduces to a box clip; kappa < 1/d admits only the origin.
Eigen::VectorXd project_rsc(const Eigen::VectorXd& y, double kappa);

// With all positive e-values equal, a non-zero relaxed self-consistent point
// exists iff that value clears m/(alpha * count).
bool feasibility_check(double e_nonzero_value, int nonzero_count, double alpha,
                       int m);

}  // namespace dacs
