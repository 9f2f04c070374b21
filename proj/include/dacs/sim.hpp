#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "dacs/score_state.hpp"

namespace dacs {

// Synthetic data generators. The u-settings draw a categorical z from a
// hierarchical Gaussian mixture with a scalar covariate; the s-settings draw
// a vector covariate (z = x) with various regression functions.
struct SimSetting {
  std::string id;
  int n = 0, m = 0, n_train = 0;
  // u-settings
  int C = 0, C_sub = 0;
  std::vector<double> pi;
  std::vector<std::vector<double>> pi_sub;
  std::vector<double> mu;
  // s-settings
  int x_dim = 0;
};

// ids: u1..u6, s1..s4. Negative sizes keep the family defaults
// (u: n=500, m=300, train=1000; s: n=500, m=100, train=1000).
SimSetting sim_setting(const std::string& id, int n = -1, int m = -1,
                       int n_train = -1);

struct SimData {
  std::vector<CalibrationSample> calib;  // mu_hat unset until a fit
  std::vector<TestSample> test;
  std::vector<double> truth_y;           // test responses
  std::vector<std::vector<double>> calib_x, test_x;  // predictor covariates
  std::vector<std::vector<double>> train_x;
  std::vector<double> train_y;
};

SimData simulate(const SimSetting& setting, std::uint64_t replicate_seed);

// Ordinary least squares with intercept; returns (intercept, coefs).
Eigen::VectorXd fit_ols(const std::vector<std::vector<double>>& x,
                        const std::vector<double>& y);

double ols_predict(const Eigen::VectorXd& w, const std::vector<double>& x);

// simulate + fit the built-in least-squares stub + fill mu_hat.
SimData simulate_with_predictor(const SimSetting& setting,
                                std::uint64_t replicate_seed);

}  // namespace dacs
