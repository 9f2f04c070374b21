#include "dacs/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace dacs {

PgdResult pgd_minimize(const GradFn& grad, const ObjFn& objective,
                       const ProjFn& project, const Eigen::VectorXd& x0,
                       const PgdConfig& config) {
  Eigen::VectorXd x = project(x0);
  Eigen::VectorXd x_prev = x;
  Eigen::VectorXd y = x;
  double theta = 1.0;
  double f_x = objective(x);
  double step = config.initial_step;
  int streak = 0;

  PgdResult res;
  res.restarts = 0;

  auto prox_step = [&](const Eigen::VectorXd& base, double& t) {
    const Eigen::VectorXd g = grad(base);
    const double f_base = objective(base);
    Eigen::VectorXd cand;
    for (;;) {
      cand = project(base - t * g);
      const Eigen::VectorXd d = cand - base;
      const double bound =
          f_base + g.dot(d) + d.squaredNorm() / (2.0 * t) +
          1e-14 * std::max(1.0, std::fabs(f_base));
      if (objective(cand) <= bound || t < 1e-18) break;
      t *= config.shrink;
    }
    return cand;
  };

  for (int k = 0; k < config.max_iters; ++k) {
    double t = step;
    Eigen::VectorXd x_new = prox_step(y, t);
    step = std::min(config.initial_step, t * 2.0);

    double f_new = objective(x_new);
    if (!std::isfinite(f_new))
      throw SolverDiverged("pgd_minimize: non-finite objective");

    if (f_new > f_x) {
      // Momentum overshot; retake the step from the last accepted iterate.
      theta = 1.0;
      ++res.restarts;
      double t2 = step;
      x_new = prox_step(x, t2);
      step = std::min(config.initial_step, t2 * 2.0);
      f_new = objective(x_new);
    }

    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    const double beta = (theta - 1.0) / theta_next;
    Eigen::VectorXd y_new = x_new + beta * (x_new - x);

    if (config.adaptive_restart && k > 0 &&
        (y - x_new).dot(x - x_prev) > 0.0) {
      y_new = x_new;
      theta = 1.0;
      ++res.restarts;
    } else {
      theta = theta_next;
    }

    const double rel =
        std::fabs(f_x - f_new) / std::max(1.0, std::fabs(f_x));
    streak = (rel < config.tol) ? streak + 1 : 0;

    x_prev = x;
    x = x_new;
    y = y_new;
    f_x = f_new;
    res.iterations = k + 1;
    if (streak >= config.tol_streak) {
      res.converged = true;
      break;
    }
  }

  res.x = project(x);  // feasibility re-check
  res.objective = objective(res.x);
  if (!res.x.allFinite())
    throw SolverDiverged("pgd_minimize: non-finite iterate");
  return res;
}

Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& cap,
                                       double total) {
  const int d = static_cast<int>(y.size());
  if (cap.size() != d) throw BadInput("project_capped_simplex: size mismatch");
  double capsum = 0.0;
  for (int i = 0; i < d; ++i) {
    if (cap[i] < 0) throw BadInput("project_capped_simplex: negative cap");
    capsum += cap[i];
  }
  if (total < -1e-12 || total > capsum + 1e-9 * std::max(1.0, capsum))
    throw Infeasible("project_capped_simplex: total outside [0, sum(cap)]");
  total = std::clamp(total, 0.0, capsum);

  // x_i(mu) = clip(y_i - mu, 0, cap_i); sum is nonincreasing in mu with
  // breakpoints at y_i and y_i - cap_i. Walk segments from the top.
  std::vector<double> brk;
  brk.reserve(2 * d);
  for (int i = 0; i < d; ++i) {
    brk.push_back(y[i]);
    brk.push_back(y[i] - cap[i]);
  }
  std::sort(brk.begin(), brk.end(), std::greater<double>());

  auto sum_at = [&](double mu) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += std::clamp(y[i] - mu, 0.0, cap[i]);
    return s;
  };

  double mu = brk.front();
  double g = sum_at(mu);
  if (g >= total) {
    // Optimal mu is above all breakpoints only when total == 0.
    mu = brk.front();
  } else {
    bool solved = false;
    for (std::size_t b = 1; b < brk.size() && !solved; ++b) {
      const double lo = brk[b];
      if (lo == mu) continue;
      const double g_lo = sum_at(lo);
      if (g_lo >= total) {
        // Linear on [lo, mu]: interpolate exactly.
        double cnt = 0.0, ylin = 0.0, fixed = 0.0;
        for (int i = 0; i < d; ++i) {
          // Classify on the open segment.
          const double mid = 0.5 * (lo + mu);
          const double v = y[i] - mid;
          if (v <= 0.0)
            continue;
          else if (v >= cap[i])
            fixed += cap[i];
          else {
            cnt += 1.0;
            ylin += y[i];
          }
        }
        mu = (cnt > 0.0) ? (ylin + fixed - total) / cnt : lo;
        solved = true;
      } else {
        mu = lo;
        g = g_lo;
      }
    }
    if (!solved) {
      // total == capsum: clamp at the lowest breakpoint.
      mu = brk.back();
    }
  }

  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x[i] = std::clamp(y[i] - mu, 0.0, cap[i]);
  return x;
}

namespace {

struct SweepBest {
  double dist2 = std::numeric_limits<double>::infinity();
  double s = 0.0;
};

// Intersect [lo, hi] with {s : blo <= a*s + b <= bhi}; infinities in blo/bhi
// drop the corresponding side.
bool intersect_linear(double a, double b, double blo, double bhi, double& lo,
                      double& hi) {
  const double inf = std::numeric_limits<double>::infinity();
  if (a == 0.0) {
    if ((blo != -inf && b < blo) || (bhi != inf && b > bhi)) return false;
    return lo <= hi;
  }
  double l = (blo == -inf) ? -inf : (blo - b) / a;
  double h = (bhi == inf) ? inf : (bhi - b) / a;
  if (a < 0.0) std::swap(l, h);
  lo = std::max(lo, l);
  hi = std::min(hi, h);
  return lo <= hi;
}

// One interval sweep: caps are kappa*s on [0, 1/kappa] (low) or 1 on
// [1/kappa, d] (high). Returns the best s found for that regime.
SweepBest rsc_sweep(const std::vector<double>& w, const std::vector<double>& P,
                    const std::vector<double>& PS, double kappa, bool low) {
  const int d = static_cast<int>(w.size());
  const double inf = std::numeric_limits<double>::infinity();
  const double s_lo = low ? 0.0 : 1.0 / kappa;
  const double s_hi = low ? 1.0 / kappa : static_cast<double>(d);
  SweepBest best;

  int r = 1;
  for (int l = 1; l <= d; ++l) {
    while (r < d && w[r - 1] < w[l - 1] + 1.0) ++r;
    for (int k = l; k <= r; ++k) {
      const int nmid = k - l + 1;
      const double sum_mid = P[k] - P[l - 1];
      // mu(s) = a_mu * s + b_mu
      const double a_mu = low ? (kappa * (d - k) - 1.0) / nmid : -1.0 / nmid;
      const double b_mu =
          low ? sum_mid / nmid : (sum_mid + (d - k)) / nmid;
      const double cap_slope = low ? kappa : 0.0;  // cap as function of s
      const double cap_const = low ? 0.0 : 1.0;

      double lo = s_lo, hi = s_hi;
      const double yl_lo = (l >= 2) ? w[l - 2] : -inf;
      if (!intersect_linear(a_mu, b_mu, yl_lo, w[l - 1], lo, hi)) continue;
      const double yk_hi = (k + 1 <= d) ? w[k] : inf;
      if (!intersect_linear(a_mu + cap_slope, b_mu + cap_const, w[k - 1],
                            yk_hi, lo, hi))
        continue;

      // ||x(s) - y||^2 as a quadratic in s.
      const double T = P[d] - P[k];
      const double TS = PS[d] - PS[k];
      double A2 = nmid * a_mu * a_mu;
      double A1 = 2.0 * nmid * a_mu * b_mu;
      double A0 = PS[l - 1] + nmid * b_mu * b_mu;
      if (low) {
        A2 += (d - k) * kappa * kappa;
        A1 += -2.0 * kappa * T;
        A0 += TS;
      } else {
        A0 += (d - k) - 2.0 * T + TS;
      }
      const double s_free = (A2 > 0.0) ? -A1 / (2.0 * A2) : lo;
      const double s_star = std::clamp(s_free, lo, hi);
      const double val = (A2 * s_star + A1) * s_star + A0;
      if (val < best.dist2) {
        best.dist2 = val;
        best.s = s_star;
      }
    }
  }
  return best;
}

}  // namespace

Eigen::VectorXd project_rsc(const Eigen::VectorXd& y, double kappa) {
  const int d = static_cast<int>(y.size());
  if (kappa <= 0.0) throw BadInput("project_rsc: kappa > 0 required");
  if (d == 0) return y;
  if (kappa >= 1.0) return y.cwiseMax(0.0).cwiseMin(1.0);
  if (kappa < 1.0 / d) return Eigen::VectorXd::Zero(d);

  std::vector<double> w(y.data(), y.data() + d);
  std::sort(w.begin(), w.end());
  std::vector<double> P(d + 1, 0.0), PS(d + 1, 0.0);
  for (int i = 1; i <= d; ++i) {
    P[i] = P[i - 1] + w[i - 1];
    PS[i] = PS[i - 1] + w[i - 1] * w[i - 1];
  }

  SweepBest lowb = rsc_sweep(w, P, PS, kappa, true);
  SweepBest highb = rsc_sweep(w, P, PS, kappa, false);
  // The origin is always feasible; covers the s = 0 corner exactly.
  const double origin = PS[d];

  double s_best;
  bool low_regime;
  if (origin <= lowb.dist2 && origin <= highb.dist2) {
    return Eigen::VectorXd::Zero(d);
  } else if (lowb.dist2 <= highb.dist2) {
    s_best = lowb.s;
    low_regime = true;
  } else {
    s_best = highb.s;
    low_regime = false;
  }
  if (s_best <= 0.0) return Eigen::VectorXd::Zero(d);

  // Recover the point exactly from the winning s.
  const double cap = low_regime ? kappa * s_best : 1.0;
  return project_capped_simplex(y, Eigen::VectorXd::Constant(d, cap), s_best);
}

bool feasibility_check(double e_nonzero_value, int nonzero_count, double alpha,
                       int m) {
  if (nonzero_count <= 0) return false;
  return approx_geq(e_nonzero_value,
                    static_cast<double>(m) / (alpha * nonzero_count));
}

}  // namespace dacs
