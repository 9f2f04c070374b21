#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "dacs/common.hpp"

namespace dacs {

// Symmetric positive definite similarity matrix. Construction validates
// symmetry and that the smallest eigenvalue exceeds 1e-10; an optional ridge
// repair shifts the diagonal just enough and records the shift.
class SimilarityMatrix {
 public:
  static SimilarityMatrix from_dense(Eigen::MatrixXd entries,
                                     bool allow_ridge_repair = false);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  double ridge_added() const { return ridge_; }

  Eigen::MatrixXd submatrix(const std::vector<int>& idx) const;

 private:
  SimilarityMatrix() = default;
  Eigen::MatrixXd entries_;
  double ridge_ = 0.0;
};

// exp(-||zi - zj||^2 / (2 b^2)); auto bandwidth = median pairwise distance.
SimilarityMatrix rbf_similarity(const std::vector<std::vector<double>>& z,
                                std::optional<double> bandwidth = {});

// |a & b| / |a | b| on binary fingerprints; indefinite matrices are repaired
// with a recorded ridge.
SimilarityMatrix tanimoto_similarity(
    const std::vector<std::vector<std::uint8_t>>& fingerprints);

// 2 / lambda_max(Sigma): a reasonable Markowitz trade-off weight. Never
// applied implicitly; callers opt in.
double markowitz_gamma_hint(const SimilarityMatrix& sigma);

}  // namespace dacs
