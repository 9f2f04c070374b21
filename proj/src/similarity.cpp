#include "dacs/similarity.hpp"

#include <algorithm>
#include <cmath>

namespace dacs {

namespace {
constexpr double kEigTol = 1e-10;
}

SimilarityMatrix SimilarityMatrix::from_dense(Eigen::MatrixXd entries,
                                              bool allow_ridge_repair) {
  const auto d = entries.rows();
  if (d == 0 || entries.cols() != d)
    throw BadInput("similarity matrix must be square and nonempty");
  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  if ((entries - entries.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw BadInput("similarity matrix must be symmetric");
  entries = 0.5 * (entries + entries.transpose().eval());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(entries,
                                                     Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  SimilarityMatrix out;
  if (lmin <= kEigTol) {
    if (!allow_ridge_repair)
      throw BadInput("similarity matrix is not positive definite");
    out.ridge_ = (1e-8 - lmin);
    entries.diagonal().array() += out.ridge_;
  }
  for (Eigen::Index i = 0; i < d; ++i)
    if (entries(i, i) <= 0.0)
      throw BadInput("similarity matrix needs positive diagonal");
  out.entries_ = std::move(entries);
  return out;
}

Eigen::MatrixXd SimilarityMatrix::submatrix(const std::vector<int>& idx) const {
  Eigen::MatrixXd sub(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b)
      sub(a, b) = entries_(idx[a], idx[b]);
  return sub;
}

SimilarityMatrix rbf_similarity(const std::vector<std::vector<double>>& z,
                                std::optional<double> bandwidth) {
  const int d = static_cast<int>(z.size());
  if (d == 0) throw BadInput("rbf_similarity: no points");
  for (const auto& v : z)
    if (v.size() != z[0].size())
      throw BadInput("rbf_similarity: inconsistent dimensions");

  auto sqdist = [&](int i, int j) {
    double s = 0.0;
    for (std::size_t k = 0; k < z[i].size(); ++k) {
      const double diff = z[i][k] - z[j][k];
      s += diff * diff;
    }
    return s;
  };

  double b = 0.0;
  if (bandwidth.has_value()) {
    b = *bandwidth;
    if (b <= 0.0) throw BadInput("rbf_similarity: bandwidth must be > 0");
  } else {
    std::vector<double> dist;
    dist.reserve(static_cast<std::size_t>(d) * (d - 1) / 2);
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) dist.push_back(std::sqrt(sqdist(i, j)));
    if (dist.empty()) {
      b = 1.0;  // single point
    } else {
      std::nth_element(dist.begin(), dist.begin() + dist.size() / 2,
                       dist.end());
      b = dist[dist.size() / 2];
      if (b <= 0.0)
        throw DegenerateBandwidth(
            "rbf_similarity: all points identical, cannot pick a bandwidth");
    }
  }

  Eigen::MatrixXd entries(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const double v = std::exp(-sqdist(i, j) / (2.0 * b * b));
      entries(i, j) = v;
      entries(j, i) = v;
    }
  return SimilarityMatrix::from_dense(std::move(entries), true);
}

SimilarityMatrix tanimoto_similarity(
    const std::vector<std::vector<std::uint8_t>>& fingerprints) {
  const int d = static_cast<int>(fingerprints.size());
  if (d == 0) throw BadInput("tanimoto_similarity: no fingerprints");
  const std::size_t len = fingerprints[0].size();
  for (const auto& f : fingerprints) {
    if (f.size() != len)
      throw BadInput("tanimoto_similarity: inconsistent lengths");
    bool any = false;
    for (auto b : f) any = any || (b != 0);
    if (!any)
      throw AllZeroFingerprint("tanimoto_similarity: all-zero fingerprint");
  }

  Eigen::MatrixXd entries(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      int inter = 0, uni = 0;
      for (std::size_t k = 0; k < len; ++k) {
        const bool a = fingerprints[i][k] != 0;
        const bool b = fingerprints[j][k] != 0;
        inter += (a && b);
        uni += (a || b);
      }
      const double v = static_cast<double>(inter) / uni;
      entries(i, j) = v;
      entries(j, i) = v;
    }
  return SimilarityMatrix::from_dense(std::move(entries), true);
}

double markowitz_gamma_hint(const SimilarityMatrix& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma.entries(),
                                                     Eigen::EigenvaluesOnly);
  return 2.0 / eig.eigenvalues().maxCoeff();
}

}  // namespace dacs
