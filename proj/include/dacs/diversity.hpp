#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "dacs/similarity.hpp"

namespace dacs {

struct Underrep {
  int categories = 2;  // C >= 2
};

struct Sharpe {
  std::shared_ptr<const SimilarityMatrix> sigma;
};

struct Markowitz {
  std::shared_ptr<const SimilarityMatrix> sigma;
  double gamma = 1.0;  // > 0
};

using DiversityMetric = std::variant<Underrep, Sharpe, Markowitz>;

bool is_relaxable(const DiversityMetric& metric);
int underrep_categories(const DiversityMetric& metric);  // 0 if not Underrep

// Diversity of an index set. For Sharpe/Markowitz the indices address the
// metric's similarity matrix; z_categories may be empty. For Underrep the
// indices address z_categories and the matrix is unused.
// Empty set: Sharpe 0, Markowitz 0, Underrep -1/C.
double eval_set(const DiversityMetric& metric, const std::vector<int>& S,
                const std::vector<int>& z_categories);

// [0,1]^p extension on an explicit submatrix; Underrep is not relaxable.
// Sharpe: 1'chi / sqrt(chi' S chi) (0 at chi = 0);
// Markowitz: 1'chi - (gamma/2) chi' S chi.
double eval_relaxed(const DiversityMetric& metric, const Eigen::VectorXd& chi,
                    const Eigen::MatrixXd& sigma_sub);

// E[ 1'xi - (gamma/2) xi' S xi ] under xi_i ~ Bern(chi_i) independent.
double expected_rounded_markowitz(const Eigen::VectorXd& chi,
                                  const Eigen::MatrixXd& sigma, double gamma);

// Monte-Carlo estimate of E[ Sharpe(xi) ] under Bernoulli rounding.
double expected_rounded_sharpe_mc(const Eigen::VectorXd& chi,
                                  const Eigen::MatrixXd& sigma, int n_draws,
                                  std::uint64_t seed);

}  // namespace dacs
