#include "dacs/diversity.hpp"

#include <algorithm>
#include <cmath>

#include "dacs/rng.hpp"

namespace dacs {

bool is_relaxable(const DiversityMetric& metric) {
  return !std::holds_alternative<Underrep>(metric);
}

int underrep_categories(const DiversityMetric& metric) {
  if (const auto* u = std::get_if<Underrep>(&metric)) return u->categories;
  return 0;
}

namespace {

double quad_form(const Eigen::MatrixXd& sigma, const std::vector<int>& S) {
  double q = 0.0;
  for (int a : S)
    for (int b : S) q += sigma(a, b);
  return q;
}

}  // namespace

double eval_set(const DiversityMetric& metric, const std::vector<int>& S,
                const std::vector<int>& z_categories) {
  if (const auto* u = std::get_if<Underrep>(&metric)) {
    const int C = u->categories;
    if (S.empty()) return -1.0 / C;
    std::vector<int> counts(C, 0);
    for (int i : S) {
      const int c = z_categories.at(i);
      if (c < 1 || c > C) throw BadInput("eval_set: category out of range");
      ++counts[c - 1];
    }
    const int mn = *std::min_element(counts.begin(), counts.end());
    return static_cast<double>(mn) / static_cast<double>(S.size());
  }
  if (const auto* sh = std::get_if<Sharpe>(&metric)) {
    if (S.empty()) return 0.0;
    return static_cast<double>(S.size()) /
           std::sqrt(quad_form(sh->sigma->entries(), S));
  }
  const auto& mk = std::get<Markowitz>(metric);
  if (S.empty()) return 0.0;
  return static_cast<double>(S.size()) -
         0.5 * mk.gamma * quad_form(mk.sigma->entries(), S);
}

double eval_relaxed(const DiversityMetric& metric, const Eigen::VectorXd& chi,
                    const Eigen::MatrixXd& sigma_sub) {
  if (std::holds_alternative<Underrep>(metric))
    throw UnsupportedRelaxation(
        "underrepresentation index has no relaxed extension");
  if (chi.size() != sigma_sub.rows())
    throw BadInput("eval_relaxed: dimension mismatch");
  const double total = chi.sum();
  if (std::holds_alternative<Sharpe>(metric)) {
    if (total == 0.0) return 0.0;
    return total / std::sqrt(chi.dot(sigma_sub * chi));
  }
  const auto& mk = std::get<Markowitz>(metric);
  return total - 0.5 * mk.gamma * chi.dot(sigma_sub * chi);
}

double expected_rounded_markowitz(const Eigen::VectorXd& chi,
                                  const Eigen::MatrixXd& sigma, double gamma) {
  const Eigen::VectorXd diag = sigma.diagonal();
  const double quad = chi.dot(sigma * chi);
  const double var_term =
      diag.dot(chi) - diag.dot(chi.cwiseProduct(chi).eval());
  return chi.sum() - 0.5 * gamma * (quad + var_term);
}

double expected_rounded_sharpe_mc(const Eigen::VectorXd& chi,
                                  const Eigen::MatrixXd& sigma, int n_draws,
                                  std::uint64_t seed) {
  if (n_draws < 1) throw BadInput("expected_rounded_sharpe_mc: n_draws >= 1");
  const int p = static_cast<int>(chi.size());
  auto rng = make_engine(seed, Stream::kSharpeRounding);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double acc = 0.0;
  std::vector<int> sel;
  for (int d = 0; d < n_draws; ++d) {
    sel.clear();
    for (int i = 0; i < p; ++i)
      if (u(rng) < chi[i]) sel.push_back(i);
    if (!sel.empty()) {
      double q = 0.0;
      for (int a : sel)
        for (int b : sel) q += sigma(a, b);
      acc += sel.size() / std::sqrt(q);
    }
  }
  return acc / n_draws;
}

}  // namespace dacs
