#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dacs/common.hpp"

namespace dacs {

// Diversification value: a categorical label (>= 1) or a real vector.
struct ZValue {
  int category = 0;             // 0 means "not categorical"
  std::vector<double> coords;   // empty unless vector-valued

  static ZValue cat(int c) { return ZValue{c, {}}; }
  static ZValue vec(std::vector<double> v) { return ZValue{0, std::move(v)}; }
  bool is_categorical() const { return category > 0; }
};

struct CalibrationSample {
  ZValue z;
  double mu_hat = 0.0;
  double y = 0.0;
};

struct TestSample {
  ZValue z;
  double mu_hat = 0.0;
};

// Extended real with a dedicated +infinity variant. Comparisons are total;
// all finite values sort below infinity.
struct ExtReal {
  double value = 0.0;
  bool infinite = false;

  static ExtReal inf() { return {0.0, true}; }
  static ExtReal fin(double v) { return {v, false}; }

  friend bool operator<(const ExtReal& a, const ExtReal& b) {
    if (a.infinite) return false;
    if (b.infinite) return true;
    return a.value < b.value;
  }
  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    if (a.infinite || b.infinite) return a.infinite == b.infinite;
    return a.value == b.value;
  }
  friend bool operator<=(const ExtReal& a, const ExtReal& b) {
    return a < b || a == b;
  }
};

struct Score {
  ExtReal value;
  bool from_calibration = false;
  int index = 0;  // position within its own list (0-based)
};

// Joint sorted view of calibration and test scores: the observable content of
// the filtration. Immutable after construction.
struct ScoreState {
  int n = 0;  // calibration count
  int m = 0;  // test count
  std::vector<ExtReal> sorted_scores;       // W_(1..n+m), nondecreasing
  std::vector<std::uint8_t> membership;     // B_s, 1 = calibration
  std::vector<int> sort_perm;               // sorted pos -> original (0..n-1 calib, n..n+m-1 test)
  std::vector<ZValue> sorted_z;             // Z^() aligned with sorted order
  std::vector<int> calib_above;             // N_t for t = 0..n+m
  std::vector<int> test_rank;               // per test unit: 1-based sorted position

  int size() const { return n + m; }
};

// V^clip: +inf when the response is observed and positive, else -mu_hat.
// Absent y is the imputed test score V^clip(x, 0).
ExtReal clipped_score(std::optional<double> y, double mu_hat);

// Sorts the pooled scores and precomputes membership, N_t and test ranks.
// Ties among finite scores throw DuplicateFiniteScore unless jitter_seed is
// given, in which case seeded uniform noise of magnitude 1e-9 x (range of
// finite scores) is added to every finite score before sorting. Ties among
// +inf calibration scores are broken by original index.
ScoreState build_score_state(const std::vector<CalibrationSample>& calib,
                             const std::vector<TestSample>& test,
                             std::optional<std::uint64_t> jitter_seed = {});

}  // namespace dacs
