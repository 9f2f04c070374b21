#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "dacs/conformal.hpp"
#include "support/fixture.hpp"

using namespace dacs;

namespace {

// Random small instance; returns false if it had ties.
bool random_instance(std::mt19937_64& rng, int n, int m,
                     std::vector<CalibrationSample>& calib,
                     std::vector<TestSample>& test) {
  std::uniform_real_distribution<double> mu(-2, 2);
  std::bernoulli_distribution pos(0.4);
  calib.assign(n, {});
  test.assign(m, {});
  for (auto& c : calib) c = {ZValue::cat(1), mu(rng), pos(rng) ? 1.0 : -1.0};
  for (auto& t : test) t = {ZValue::cat(1), mu(rng)};
  try {
    build_score_state(calib, test);
  } catch (const DuplicateFiniteScore&) {
    return false;
  }
  return true;
}

}  // namespace

TEST_CASE("conformal p-values on the fixture") {
  const auto st = testing::fixture_state();
  const auto p = conformal_p_values(st);
  CHECK(p[0] == doctest::Approx(1.0 / 5).epsilon(1e-15));
  CHECK(p[3] == doctest::Approx(3.0 / 5).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(2.0 / 5).epsilon(1e-15));
  CHECK(p[2] == doctest::Approx(2.0 / 5).epsilon(1e-15));
}

TEST_CASE("all-infinite calibration scores give minimal p-values") {
  std::vector<CalibrationSample> calib(5);
  for (int i = 0; i < 5; ++i) calib[i] = {ZValue::cat(1), 0.1 * i, 1.0};
  const auto st = build_score_state(calib, testing::fixture_test());
  for (double p : conformal_p_values(st))
    CHECK(p == doctest::Approx(1.0 / 6).epsilon(1e-15));
}

TEST_CASE("BH stopping time on the fixture") {
  const auto st = testing::fixture_state();
  CHECK(bh_stopping_time(st, 0.6) == 6);
  CHECK(bh_stopping_time(st, 0.5) == 0);
}

TEST_CASE("BH stopping time on an all-test prefix") {
  // All calibration responses positive: calibration scores all infinite,
  // so the first m sorted positions are test points. At alpha = 1/(n+1)
  // the criterion holds exactly at t = m and fails beyond.
  std::vector<CalibrationSample> calib(4);
  for (int i = 0; i < 4; ++i) calib[i] = {ZValue::cat(1), 0.1 * i, 1.0};
  const auto st = build_score_state(calib, testing::fixture_test());
  CHECK(bh_stopping_time(st, 1.0 / 5) == 4);
}

TEST_CASE("e-values at fixture times") {
  const auto st = testing::fixture_state();
  const auto e6 = e_values_at(st, 6);
  CHECK(e6.denom == 3);
  for (double v : e6.values)
    CHECK(v == doctest::Approx(5.0 / 3).epsilon(1e-15));
  const auto e1 = e_values_at(st, 1);
  CHECK(e1.values[0] == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(e1.values[1] == 0.0);
  CHECK(e1.values[2] == 0.0);
  CHECK(e1.values[3] == 0.0);
}

TEST_CASE("e-values all zero when no test rank fits") {
  std::vector<CalibrationSample> calib(3);
  calib[0] = {ZValue::cat(1), 5.0, -1.0};   // V = -5, lowest
  calib[1] = {ZValue::cat(1), 4.0, -1.0};
  calib[2] = {ZValue::cat(1), 3.0, -1.0};
  std::vector<TestSample> test = {{ZValue::cat(1), -1.0}};
  const auto st = build_score_state(calib, test);
  const auto e = e_values_at(st, 2);
  CHECK(e.values[0] == 0.0);
}

TEST_CASE("self-consistency checks") {
  const auto st = testing::fixture_state();
  const auto e = e_values_at(st, 6);
  CHECK(is_self_consistent({0, 1, 2, 3}, e, 0.6, 4));  // equality boundary
  CHECK(is_self_consistent({}, e, 0.6, 4));
  CHECK_FALSE(is_self_consistent({0}, e, 0.6, 4));
}

TEST_CASE("cs selection on the fixture") {
  const auto st = testing::fixture_state();
  CHECK(cs_selection(st, 0.6) == std::vector<int>{0, 1, 2, 3});
  CHECK(cs_selection(st, 0.5).empty());
}

TEST_CASE("cs empty when predictions rank calibration above test") {
  std::vector<CalibrationSample> calib(6);
  for (int i = 0; i < 6; ++i)
    calib[i] = {ZValue::cat(1), 5.0 + 0.1 * i, -1.0};  // huge mu, null
  std::vector<TestSample> test(3);
  for (int i = 0; i < 3; ++i) test[i] = {ZValue::cat(1), -4.0 - 0.1 * i};
  const auto st = build_score_state(calib, test);
  CHECK(cs_selection(st, 0.25).empty());
}

TEST_CASE("cs agrees with direct BH on p-values over random instances") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> nn(1, 20), mm(1, 20);
  std::uniform_real_distribution<double> aa(0.05, 0.9);
  int done = 0;
  while (done < 200) {
    std::vector<CalibrationSample> calib;
    std::vector<TestSample> test;
    if (!random_instance(rng, nn(rng), mm(rng), calib, test)) continue;
    ++done;
    const auto st = build_score_state(calib, test);
    const double alpha = aa(rng);
    auto via_evalues = cs_selection(st, alpha);
    auto via_pvalues = bh_on_pvalues(conformal_p_values(st), alpha);
    std::sort(via_evalues.begin(), via_evalues.end());
    CHECK(via_evalues == via_pvalues);
  }
}

TEST_CASE("positive e-values never die as t grows") {
  std::mt19937_64 rng(13);
  std::vector<CalibrationSample> calib;
  std::vector<TestSample> test;
  while (!random_instance(rng, 8, 6, calib, test)) {
  }
  const auto st = build_score_state(calib, test);
  for (int t = 1; t < st.size(); ++t) {
    const auto now = e_values_at(st, t);
    const auto next = e_values_at(st, t + 1);
    for (int i = 0; i < st.m; ++i)
      if (now.values[i] > 0.0) CHECK(next.values[i] > 0.0);
  }
}

TEST_CASE("e-value budget: mean e * null-indicator stays below one") {
  // Fixed stopping rule tau = ceil((n+m)/2) measured from the suffix only.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> mu(-2, 2);
  const int n = 12, m = 8, reps = 600;
  std::vector<std::vector<double>> contrib(m);
  for (int rep = 0; rep < reps; ++rep) {
    std::vector<CalibrationSample> calib(n);
    std::vector<TestSample> test(m);
    std::vector<double> ytest(m);
    std::normal_distribution<double> gauss(0, 1);
    for (auto& c : calib) {
      const double x = gauss(rng);
      c = {ZValue::cat(1), x, x + gauss(rng)};
    }
    for (int i = 0; i < m; ++i) {
      const double x = gauss(rng);
      test[i] = {ZValue::cat(1), x};
      ytest[i] = x + gauss(rng);
    }
    ScoreState st;
    try {
      st = build_score_state(calib, test);
    } catch (const DuplicateFiniteScore&) {
      --rep;
      continue;
    }
    const int tau = (n + m + 1) / 2;
    const auto e = e_values_at(st, tau);
    for (int i = 0; i < m; ++i)
      contrib[i].push_back(ytest[i] <= 0.0 ? e.values[i] : 0.0);
  }
  for (int i = 0; i < m; ++i) {
    double acc = 0.0, ss = 0.0;
    for (double v : contrib[i]) acc += v;
    const double mean = acc / reps;
    for (double v : contrib[i]) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / (reps - 1)) / std::sqrt(double(reps));
    CHECK(mean <= 1.0 + 3.0 * se);
  }
}
