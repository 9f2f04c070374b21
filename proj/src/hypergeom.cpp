#include "dacs/hypergeom.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>

namespace dacs {

namespace {

// FFTW plan creation is not thread-safe; execution on private buffers is.
std::mutex g_fftw_mutex;

double lchoose(long n, long k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
         std::lgamma(n - k + 1.0);
}

struct FftWorkspace {
  int len = 0;
  double* real = nullptr;
  fftw_complex* freq = nullptr;
  std::vector<std::complex<double>> prod;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  explicit FftWorkspace(int L) : len(L), prod(L / 2 + 1) {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    real = fftw_alloc_real(L);
    freq = fftw_alloc_complex(L / 2 + 1);
    fwd = fftw_plan_dft_r2c_1d(L, real, freq, FFTW_ESTIMATE);
    inv = fftw_plan_c2r_1d(L, freq, real, FFTW_ESTIMATE);
  }
  ~FftWorkspace() {
    std::lock_guard<std::mutex> lock(g_fftw_mutex);
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(freq);
  }
  FftWorkspace(const FftWorkspace&) = delete;
  FftWorkspace& operator=(const FftWorkspace&) = delete;
};

int next_pow2(int x) {
  int L = 1;
  while (L < x) L <<= 1;
  return L;
}

}  // namespace

double hypergeom_pmf(long total, long marked, long draws, long k) {
  if (total < 0 || marked < 0 || marked > total || draws < 0 || draws > total)
    throw BadInput("hypergeom_pmf: invalid parameters");
  if (k < std::max(0L, draws - (total - marked)) || k > std::min(draws, marked))
    return 0.0;
  if (draws == 0) return 1.0;
  if (draws == 1)
    return k == 1 ? static_cast<double>(marked) / total
                  : static_cast<double>(total - marked) / total;
  return std::exp(lchoose(marked, k) + lchoose(total - marked, draws - k) -
                  lchoose(total, draws));
}

std::vector<std::vector<double>> min_survival_fft_batch(
    const std::vector<int>& counts, const std::vector<int>& draws_list,
    const std::vector<int>& nu_max) {
  const int C = static_cast<int>(counts.size());
  if (C == 0) throw BadInput("min_survival: no categories");
  long total = 0;
  int minpop = counts[0];
  for (int c : counts) {
    if (c < 0) throw BadInput("min_survival: negative population");
    total += c;
    minpop = std::min(minpop, c);
  }
  if (draws_list.size() != nu_max.size())
    throw BadInput("min_survival: mismatched batch sizes");

  std::vector<std::vector<double>> out(draws_list.size());
  // Effective cap per entry: S(nu) = 0 once nu exceeds the smallest
  // population or once C*nu exceeds the draw count.
  std::vector<int> cap(draws_list.size());
  for (std::size_t j = 0; j < draws_list.size(); ++j) {
    const int D = draws_list[j];
    if (D < 0 || D > total) throw BadInput("min_survival: draws out of range");
    out[j].assign(std::max(0, nu_max[j]), 0.0);
    if (D == total) {
      // Forced full draw: the sample is the whole population.
      for (int nu = 1; nu <= nu_max[j]; ++nu)
        if (nu <= minpop) out[j][nu - 1] = 1.0;
      cap[j] = 0;
      continue;
    }
    cap[j] = std::min({nu_max[j], minpop, D / C});
  }

  // Remaining entries need the FFT route; group them into windows of nearby
  // draw counts so a single tilt keeps every conditioning event central.
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < draws_list.size(); ++j)
    if (cap[j] >= 1) order.push_back(j);
  if (order.empty()) return out;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return draws_list[a] < draws_list[b];
  });

  const int L = next_pow2(static_cast<int>(total) + 1);
  FftWorkspace ws(L);

  std::size_t w0 = 0;
  while (w0 < order.size()) {
    const int dlo = draws_list[order[w0]];
    std::size_t w1 = w0;
    int dhi = dlo;
    while (w1 + 1 < order.size()) {
      const int cand = draws_list[order[w1 + 1]];
      const double mid = 0.5 * (dlo + cand);
      const double p = std::clamp(mid / total, 0.5 / total, 1.0 - 0.5 / total);
      const double sigma = std::sqrt(total * p * (1.0 - p));
      if (0.5 * (cand - dlo) > 4.0 * sigma + 4.0) break;
      ++w1;
      dhi = cand;
    }

    const double p =
        std::clamp(0.5 * (dlo + dhi) / total, 0.5 / total, 1.0 - 0.5 / total);
    const double logp = std::log(p), logq = std::log1p(-p);

    // Per-category Binomial(N_c, p) log-PMFs.
    std::vector<std::vector<double>> lpmf(C);
    for (int c = 0; c < C; ++c) {
      lpmf[c].resize(counts[c] + 1);
      for (int w = 0; w <= counts[c]; ++w)
        lpmf[c][w] = lchoose(counts[c], w) + w * logp + (counts[c] - w) * logq;
    }

    int numax_win = 0;
    for (std::size_t k = w0; k <= w1; ++k)
      numax_win = std::max(numax_win, cap[order[k]]);

    for (int nu = 1; nu <= numax_win; ++nu) {
      // Convolve the normalized truncated PMFs; track the truncation mass in
      // log space so the FFT only ever sees well-scaled inputs.
      double log_trunc_mass = 0.0;
      bool empty = false;
      std::fill(ws.prod.begin(), ws.prod.end(), std::complex<double>(1.0, 0));
      for (int c = 0; c < C && !empty; ++c) {
        double mass = 0.0;
        double lmax = -std::numeric_limits<double>::infinity();
        for (int w = nu; w <= counts[c]; ++w) lmax = std::max(lmax, lpmf[c][w]);
        std::fill(ws.real, ws.real + L, 0.0);
        if (!std::isfinite(lmax)) {
          empty = true;
          break;
        }
        for (int w = nu; w <= counts[c]; ++w) {
          const double v = std::exp(lpmf[c][w] - lmax);
          ws.real[w] = v;
          mass += v;
        }
        for (int w = nu; w <= counts[c]; ++w) ws.real[w] /= mass;
        log_trunc_mass += std::log(mass) + lmax;
        fftw_execute(ws.fwd);
        const auto* f = reinterpret_cast<std::complex<double>*>(ws.freq);
        for (int k = 0; k <= L / 2; ++k) ws.prod[k] *= f[k];
      }
      if (empty) continue;

      auto* f = reinterpret_cast<std::complex<double>*>(ws.freq);
      for (int k = 0; k <= L / 2; ++k) f[k] = ws.prod[k];
      fftw_execute(ws.inv);

      for (std::size_t k = w0; k <= w1; ++k) {
        const std::size_t j = order[k];
        if (nu > cap[j]) continue;
        const int D = draws_list[j];
        const double cond = ws.real[D] / L;  // P(sum = D | all >= nu)
        const double ldenom =
            lchoose(total, D) + D * logp + (total - D) * logq;
        double s = cond * std::exp(log_trunc_mass - ldenom);
        s = std::clamp(s, 0.0, 1.0);
        if (s < 1e-13) s = 0.0;  // FFT round-off floor
        out[j][nu - 1] = s;
      }
    }
    w0 = w1 + 1;
  }
  return out;
}

std::vector<double> min_survival_fft(const std::vector<int>& counts, int draws,
                                     int nu_max) {
  return min_survival_fft_batch(counts, {draws}, {nu_max})[0];
}

}  // namespace dacs
