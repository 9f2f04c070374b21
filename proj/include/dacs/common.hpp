#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dacs {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DuplicateFiniteScore : Error { using Error::Error; };
struct EmptyTestSet : Error { using Error::Error; };
struct DegenerateBandwidth : Error { using Error::Error; };
struct AllZeroFingerprint : Error { using Error::Error; };
struct UnsupportedRelaxation : Error { using Error::Error; };
struct Infeasible : Error { using Error::Error; };
struct SolverDiverged : Error { using Error::Error; };
struct MissingCell : Error { using Error::Error; };
struct NoFlippableOne : Error { using Error::Error; };
struct UnknownSetting : Error { using Error::Error; };
struct BadInput : Error { using Error::Error; };

// Threshold comparisons against quantities of the form m/(alpha*k) hit exact
// equality by construction (e.g. the BH boundary), where binary rounding of
// alpha would flip the answer. All such comparisons go through these helpers.
inline constexpr double kRelTol = 1e-12;

inline bool approx_leq(double a, double b) {
  return a <= b + kRelTol * std::max({std::fabs(a), std::fabs(b), 1.0});
}

inline bool approx_geq(double a, double b) {
  return a >= b - kRelTol * std::max({std::fabs(a), std::fabs(b), 1.0});
}

// ceil with the same guard, so ceil(m*(1+n-s)/(alpha*(n+1))) is stable when
// the ratio is an integer up to rounding of alpha.
inline long ceil_tol(double x) {
  return static_cast<long>(std::ceil(x - 1e-9 * (1.0 + std::fabs(x))));
}

}  // namespace dacs
