#include "dacs/score_state.hpp"

#include <algorithm>
#include <limits>

#include "dacs/rng.hpp"

namespace dacs {

ExtReal clipped_score(std::optional<double> y, double mu_hat) {
  if (y.has_value() && *y > 0.0) return ExtReal::inf();
  return ExtReal::fin(-mu_hat);
}

ScoreState build_score_state(const std::vector<CalibrationSample>& calib,
                             const std::vector<TestSample>& test,
                             std::optional<std::uint64_t> jitter_seed) {
  if (test.empty()) throw EmptyTestSet("build_score_state: empty test list");
  const int n = static_cast<int>(calib.size());
  const int m = static_cast<int>(test.size());

  std::vector<Score> scores;
  scores.reserve(n + m);
  for (int i = 0; i < n; ++i)
    scores.push_back({clipped_score(calib[i].y, calib[i].mu_hat), true, i});
  for (int i = 0; i < m; ++i)
    scores.push_back({clipped_score(std::nullopt, test[i].mu_hat), false, i});

  if (jitter_seed.has_value()) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& s : scores)
      if (!s.value.infinite) {
        lo = std::min(lo, s.value.value);
        hi = std::max(hi, s.value.value);
      }
    const double range = (hi > lo) ? hi - lo : 1.0;
    auto rng = make_engine(*jitter_seed, Stream::kJitter);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& s : scores)
      if (!s.value.infinite) s.value.value += 1e-9 * range * u(rng);
  }

  // Stable sort keeps +inf calibration ties in original-index order.
  std::stable_sort(scores.begin(), scores.end(),
                   [](const Score& a, const Score& b) {
                     return a.value < b.value;
                   });

  for (int s = 1; s < n + m; ++s)
    if (!scores[s].value.infinite && scores[s].value == scores[s - 1].value)
      throw DuplicateFiniteScore(
          "build_score_state: tied finite scores (enable jitter or perturb "
          "mu_hat)");

  ScoreState st;
  st.n = n;
  st.m = m;
  st.sorted_scores.resize(n + m);
  st.membership.resize(n + m);
  st.sort_perm.resize(n + m);
  st.sorted_z.resize(n + m);
  st.test_rank.assign(m, 0);
  for (int s = 0; s < n + m; ++s) {
    const Score& sc = scores[s];
    st.sorted_scores[s] = sc.value;
    st.membership[s] = sc.from_calibration ? 1 : 0;
    st.sort_perm[s] = sc.from_calibration ? sc.index : n + sc.index;
    st.sorted_z[s] =
        sc.from_calibration ? calib[sc.index].z : test[sc.index].z;
    if (!sc.from_calibration) st.test_rank[sc.index] = s + 1;
  }

  st.calib_above.assign(n + m + 1, 0);
  for (int t = n + m - 1; t >= 0; --t)
    st.calib_above[t] = st.calib_above[t + 1] + st.membership[t];
  return st;
}

}  // namespace dacs
