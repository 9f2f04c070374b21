#include "dacs/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "dacs/csv.hpp"
#include "dacs/pipeline.hpp"
#include "dacs/relaxed.hpp"
#include "dacs/rng.hpp"

namespace dacs {

std::pair<double, double> fdp_and_power(const std::vector<int>& selected,
                                        const std::vector<double>& truth_y) {
  int false_disc = 0, true_disc = 0, positives = 0;
  for (double y : truth_y) positives += (y > 0.0);
  for (int i : selected) {
    if (truth_y.at(i) <= 0.0)
      ++false_disc;
    else
      ++true_disc;
  }
  const double fdp =
      static_cast<double>(false_disc) / std::max<std::size_t>(1, selected.size());
  const double power = static_cast<double>(true_disc) / std::max(1, positives);
  return {fdp, power};
}

std::vector<double> baseline_diversity_draws(
    const std::vector<Eigen::VectorXd>& per_time_chi,
    const DiversityMetric& metric, const std::vector<TestSample>& test, int n,
    int rounding_reps, std::uint64_t seed) {
  std::vector<double> draws;
  draws.reserve(per_time_chi.size() * rounding_reps);
  for (std::size_t t = 0; t < per_time_chi.size(); ++t) {
    for (int d = 0; d < rounding_reps; ++d) {
      auto rng = make_engine(seed, Stream::kBaseline,
                             static_cast<std::uint64_t>(t),
                             static_cast<std::uint64_t>(d));
      const std::vector<int> R = randomized_round(per_time_chi[t], rng);
      draws.push_back(selection_diversity(metric, R, test, n));
    }
  }
  return draws;
}

double baseline_cdf_normalize(double diversity_value,
                              const std::vector<double>& baseline_draws) {
  if (baseline_draws.empty()) throw BadInput("baseline CDF needs draws");
  std::size_t below = 0;
  for (double v : baseline_draws) below += (v <= diversity_value);
  return static_cast<double>(below) / baseline_draws.size();
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / (v.size() - 1)) / std::sqrt(double(v.size()));
}

std::vector<EvalSummary> EvalReport::summarize() const {
  std::map<std::pair<std::string, double>, std::vector<const EvalRow*>> groups;
  for (const auto& r : rows) groups[{r.method, r.alpha}].push_back(&r);
  std::vector<EvalSummary> out;
  for (const auto& [key, g] : groups) {
    EvalSummary s;
    s.method = key.first;
    s.alpha = key.second;
    s.reps = static_cast<int>(g.size());
    std::vector<double> fdp, power, div_nonempty, nsel, secs, empty;
    for (const auto* r : g) {
      fdp.push_back(r->fdp);
      power.push_back(r->power);
      nsel.push_back(r->n_selected);
      secs.push_back(r->seconds);
      empty.push_back(r->nonempty ? 0.0 : 1.0);
      if (r->nonempty) div_nonempty.push_back(r->diversity);
    }
    s.fdr = mean(fdp);
    s.fdr_se = standard_error(fdp);
    s.power = mean(power);
    s.power_se = standard_error(power);
    s.diversity_nonempty = mean(div_nonempty);
    s.diversity_nonempty_se = standard_error(div_nonempty);
    s.mean_selected = mean(nsel);
    s.empty_rate = mean(empty);
    s.mean_seconds = mean(secs);
    out.push_back(s);
  }
  return out;
}

void EvalReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw BadInput("cannot write " + path);
  out << "replicate,alpha,method,fdp,power,diversity,nonempty,n_selected,"
         "tau_star,seconds,normalized_diversity\n";
  for (const auto& r : rows) {
    out << r.replicate << "," << format_double(r.alpha) << "," << r.method
        << "," << format_double(r.fdp) << "," << format_double(r.power) << ","
        << format_double(r.diversity) << "," << (r.nonempty ? 1 : 0) << ","
        << r.n_selected << "," << r.tau_star << ","
        << format_double(r.seconds) << ","
        << (r.normalized_diversity < 0.0
                ? std::string("")
                : format_double(r.normalized_diversity))
        << "\n";
  }
}

void EvalReport::write_summary_csv(const std::string& path,
                                   const std::vector<EvalSummary>& summaries) {
  std::ofstream out(path);
  if (!out) throw BadInput("cannot write " + path);
  out << "method,alpha,reps,fdr,fdr_se,power,power_se,diversity_nonempty,"
         "diversity_nonempty_se,mean_selected,empty_rate,mean_seconds\n";
  for (const auto& s : summaries) {
    out << s.method << "," << format_double(s.alpha) << "," << s.reps << ","
        << format_double(s.fdr) << "," << format_double(s.fdr_se) << ","
        << format_double(s.power) << "," << format_double(s.power_se) << ","
        << format_double(s.diversity_nonempty) << ","
        << format_double(s.diversity_nonempty_se) << ","
        << format_double(s.mean_selected) << ","
        << format_double(s.empty_rate) << "," << format_double(s.mean_seconds)
        << "\n";
  }
}

}  // namespace dacs
