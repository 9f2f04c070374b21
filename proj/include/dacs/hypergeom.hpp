#pragma once

#include <vector>

#include "dacs/common.hpp"

namespace dacs {

// PMF of Hypergeom(T, S, N): successes when drawing N of T items of which S
// are marked. Exact for N <= 1; log-gamma otherwise (relative error ~1e-14).
double hypergeom_pmf(long total, long marked, long draws, long k);

// Survival probabilities S(nu) = P(min_c H_c >= nu), nu = 1..nu_max, where
// (H_1..H_C) is a multivariate hypergeometric draw of `draws` items from
// populations `counts`. Computed through the conditional-Binomial identity:
// the joint law equals independent Binom(N_c, p) conditioned on their sum,
// for any common p, so each survival value is a ratio of a truncated-Binomial
// convolution (by FFT) to a Binomial PMF. p is tilted to make the
// conditioning event central.
std::vector<double> min_survival_fft(const std::vector<int>& counts,
                                     int draws, int nu_max);

// Batch variant sharing FFT work across several draw counts for the same
// populations: result[j][nu-1] = S(nu) for draws_list[j], nu <= nu_max[j].
std::vector<std::vector<double>> min_survival_fft_batch(
    const std::vector<int>& counts, const std::vector<int>& draws_list,
    const std::vector<int>& nu_max);

}  // namespace dacs
