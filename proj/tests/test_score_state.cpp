#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dacs/score_state.hpp"
#include "support/fixture.hpp"

using namespace dacs;

TEST_CASE("clipped score branches") {
  CHECK(clipped_score(1.2, 0.4).infinite);
  CHECK(clipped_score(-0.1, 0.4) == ExtReal::fin(-0.4));
  CHECK(clipped_score(0.0, 0.4) == ExtReal::fin(-0.4));  // y <= 0
  CHECK(clipped_score(std::nullopt, 0.7) == ExtReal::fin(-0.7));
}

TEST_CASE("extended real ordering is total") {
  CHECK(ExtReal::fin(3.0) < ExtReal::inf());
  CHECK_FALSE(ExtReal::inf() < ExtReal::fin(1e300));
  CHECK(ExtReal::inf() == ExtReal::inf());
  CHECK(ExtReal::fin(1.0) < ExtReal::fin(2.0));
}

TEST_CASE("fixture sort, membership and calib-above counts") {
  const ScoreState st = testing::fixture_state();
  REQUIRE(st.n == 4);
  REQUIRE(st.m == 4);
  const std::vector<std::uint8_t> want_b = {0, 1, 0, 0, 1, 0, 1, 1};
  CHECK(st.membership == want_b);
  CHECK(st.calib_above[6] == 2);
  CHECK(st.calib_above[4] == 3);
  CHECK(st.calib_above[0] == 4);
  CHECK(st.calib_above[8] == 0);
  // test ranks: Vhat = .1,.5,.7,1.2 -> sorted positions 1,3,4,6
  CHECK(st.test_rank == std::vector<int>{1, 3, 4, 6});
  // +inf calibration ties keep original order
  CHECK(st.sort_perm[6] == 1);
  CHECK(st.sort_perm[7] == 3);
}

TEST_CASE("single calibration pair") {
  const auto st = build_score_state({{ZValue::cat(1), 0.2, 1.0}},
                                    {{ZValue::cat(1), -0.5}});
  CHECK(st.membership == std::vector<std::uint8_t>{0, 1});
  CHECK(st.sorted_scores[0] == ExtReal::fin(0.5));
  CHECK(st.sorted_scores[1].infinite);
}

TEST_CASE("empty test list rejected") {
  CHECK_THROWS_AS(build_score_state(testing::fixture_calib(), {}),
                  EmptyTestSet);
}

TEST_CASE("finite ties rejected unless jitter requested") {
  auto calib = testing::fixture_calib();
  auto test = testing::fixture_test();
  test[1].mu_hat = test[0].mu_hat;
  CHECK_THROWS_AS(build_score_state(calib, test), DuplicateFiniteScore);
  const ScoreState st = build_score_state(calib, test, 123u);
  CHECK(st.size() == 8);  // jitter resolved the tie
  const ScoreState st2 = build_score_state(calib, test, 123u);
  CHECK(st.membership == st2.membership);  // seeded => reproducible
}

TEST_CASE("property: N_{t-1} = N_t + B_t") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mu(-2, 2);
  std::bernoulli_distribution pos(0.4);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<CalibrationSample> calib(6);
    std::vector<TestSample> test(5);
    for (auto& c : calib) c = {ZValue::cat(1), mu(rng), pos(rng) ? 1.0 : -1.0};
    for (auto& t : test) t = {ZValue::cat(1), mu(rng)};
    ScoreState st;
    try {
      st = build_score_state(calib, test);
    } catch (const DuplicateFiniteScore&) {
      continue;
    }
    for (int t = 1; t <= st.size(); ++t)
      CHECK(st.calib_above[t - 1] == st.calib_above[t] + st.membership[t - 1]);
  }
}

TEST_CASE("property: sorted origins recover the input scores") {
  const ScoreState st = testing::fixture_state();
  const auto calib = testing::fixture_calib();
  const auto test = testing::fixture_test();
  for (int s = 0; s < st.size(); ++s) {
    const int o = st.sort_perm[s];
    const ExtReal expect = o < st.n
                               ? clipped_score(calib[o].y, calib[o].mu_hat)
                               : clipped_score({}, test[o - st.n].mu_hat);
    CHECK(st.sorted_scores[s] == expect);
  }
}

TEST_CASE("property: shifting all mu_hat leaves ranks alone") {
  auto calib = testing::fixture_calib();
  auto test = testing::fixture_test();
  const ScoreState before = build_score_state(calib, test);
  for (auto& c : calib) c.mu_hat += 17.5;
  for (auto& t : test) t.mu_hat += 17.5;
  const ScoreState after = build_score_state(calib, test);
  CHECK(before.membership == after.membership);
  CHECK(before.calib_above == after.calib_above);
  CHECK(before.sort_perm == after.sort_perm);
}
