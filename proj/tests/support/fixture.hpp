#pragma once

// Canonical 4+4 instance used across the suites: calibration scores
// (0.9, inf, 0.3, inf), test scores (0.1, 0.5, 0.7, 1.2). Sorted membership
// is B = (0,1,0,0,1,0,1,1) and tau_BH(0.6) = 6 with N_6 = 2.

#include <vector>

#include "dacs/score_state.hpp"

namespace dacs::testing {

inline std::vector<CalibrationSample> fixture_calib() {
  return {
      {ZValue::cat(1), -0.9, -1.0},  // V = 0.9
      {ZValue::cat(2), 0.4, 1.2},    // V = inf
      {ZValue::cat(1), -0.3, -0.5},  // V = 0.3
      {ZValue::cat(2), 0.8, 0.3},    // V = inf
  };
}

inline std::vector<TestSample> fixture_test() {
  return {
      {ZValue::cat(1), -0.1},  // Vhat = 0.1
      {ZValue::cat(2), -0.5},  // Vhat = 0.5
      {ZValue::cat(1), -0.7},  // Vhat = 0.7
      {ZValue::cat(2), -1.2},  // Vhat = 1.2
  };
}

inline ScoreState fixture_state() {
  return build_score_state(fixture_calib(), fixture_test());
}

}  // namespace dacs::testing
