#pragma once

#include <vector>

#include "dacs/score_state.hpp"

namespace dacs {

// Time-t e-values: values[i] is 0 or (n+1)/denom with denom = 1 + n - N_t.
struct EValueVector {
  int t = 0;
  std::vector<double> values;
  long denom = 0;
};

// p_i = (1 + #{j : V_j <= Vhat_i}) / (n+1)
std::vector<double> conformal_p_values(const ScoreState& state);

// Largest t whose running FDP estimate is below alpha; 0 if none.
int bh_stopping_time(const ScoreState& state, double alpha);

EValueVector e_values_at(const ScoreState& state, int t);

// Self-consistency: e_i >= m/(alpha*|R|) for all i in R (empty set passes).
bool is_self_consistent(const std::vector<int>& selected,
                        const EValueVector& e, double alpha, int m);

// BH rejection set on arbitrary p-values at level alpha (0-based indices).
std::vector<int> bh_on_pvalues(const std::vector<double>& pvals, double alpha);

// Conformal selection baseline: BH on conformal p-values, equivalently the
// units with positive e-value at the BH stopping time.
std::vector<int> cs_selection(const ScoreState& state, double alpha);

}  // namespace dacs
