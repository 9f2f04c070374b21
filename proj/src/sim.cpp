#include "dacs/sim.hpp"

#include <cmath>

#include "dacs/rng.hpp"

namespace dacs {

SimSetting sim_setting(const std::string& id, int n, int m, int n_train) {
  SimSetting s;
  s.id = id;
  const bool underrep = !id.empty() && id[0] == 'u';
  s.n = n >= 0 ? n : 500;
  s.m = m >= 0 ? m : (underrep ? 300 : 100);
  s.n_train = n_train >= 0 ? n_train : 1000;

  if (id == "u1") {
    s.C = 3; s.C_sub = 3;
    s.pi = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    s.pi_sub = {{0.8, 0.05, 0.15}, {0.2, 0.6, 0.2}, {0.2, 0.2, 0.6}};
    s.mu = {-0.5, 1.5, 2.0};
  } else if (id == "u2") {
    s.C = 2; s.C_sub = 3;
    s.pi = {0.5, 0.5};
    s.pi_sub = {{0.8, 0.05, 0.15}, {0.15, 0.75, 0.1}};
    s.mu = {0.0, -2.0, 1.5};
  } else if (id == "u3") {
    s.C = 2; s.C_sub = 3;
    s.pi = {0.5, 0.5};
    s.pi_sub = {{0.05, 0.85, 0.1}, {0.4, 0.2, 0.4}};
    s.mu = {0.0, -M_PI, 0.7};
  } else if (id == "u4") {
    s.C = 4; s.C_sub = 5;
    s.pi = {0.25, 0.25, 0.25, 0.25};
    s.pi_sub = {{0.2, 0, 0, 0, 0.8},
                {0, 0.22, 0.35, 0.43, 0},
                {0.15, 0.35, 0.15, 0.1, 0.25},
                {0.2, 0.05, 0.05, 0.05, 0.65}};
    s.mu = {-2.0, -1.0, 0.0, 1.5, 3.0};
  } else if (id == "u5") {
    s.C = 2; s.C_sub = 3;
    s.pi = {0.7, 0.3};
    s.pi_sub = {{0.8, 0.05, 0.15}, {0.15, 0.75, 0.1}};
    s.mu = {0.0, -2.0, 1.5};
  } else if (id == "u6") {
    s.C = 3; s.C_sub = 3;
    s.pi = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    s.pi_sub = {{1, 0, 0}, {0.2, 0.2, 0.6}, {0.2, 0.6, 0.2}};
    s.mu = {-0.75, 0.5, 1.2};
  } else if (id == "s1") {
    s.x_dim = 3;
  } else if (id == "s2" || id == "s3" || id == "s4") {
    s.x_dim = 5;
  } else {
    throw UnknownSetting("unknown simulation setting '" + id + "'");
  }
  return s;
}

namespace {

double regression_u(const std::string& id, double x) {
  if (id == "u1") return x;
  if (id == "u2" || id == "u5") return x * x - 1.0;
  if (id == "u3") return 2.0 * std::cos(x);
  if (id == "u4") return x > 0.0 ? 1.5 : -1.5;
  return x * x * x + x;  // u6
}

double regression_s(const std::string& id, const std::vector<double>& x) {
  if (id == "s1") return x[0] * x[1] + x[2];
  double nrm2 = 0.0;
  for (double v : x) nrm2 += v * v;
  if (id == "s2") return nrm2 - 3.5;
  if (id == "s3") return 2.0 * std::cos(x[0]);
  return 3.5 - nrm2;  // s4
}

int draw_class(const std::vector<double>& probs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double r = u(rng);
  for (std::size_t c = 0; c + 1 < probs.size(); ++c) {
    if (r < probs[c]) return static_cast<int>(c);
    r -= probs[c];
  }
  return static_cast<int>(probs.size()) - 1;
}

// Mixture means for setting s1.
const double kS1Means[5][3] = {{1, -1, 1},
                               {0.75, 4, 2},
                               {-2, -1.5, 1},
                               {1.5, 2, 1.5},
                               {-5, 3, 2}};

}  // namespace

SimData simulate(const SimSetting& setting, std::uint64_t replicate_seed) {
  auto rng = make_engine(replicate_seed, Stream::kSimulate);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SimData data;

  const int total = setting.n_train + setting.n + setting.m;
  if (setting.C > 0) {
    for (int i = 0; i < total; ++i) {
      const int z = draw_class(setting.pi, rng);
      const int zsub = draw_class(setting.pi_sub[z], rng);
      const double x = setting.mu[zsub] + gauss(rng);
      const double y = regression_u(setting.id, x) + gauss(rng);
      if (i < setting.n_train) {
        data.train_x.push_back({x});
        data.train_y.push_back(y);
      } else if (i < setting.n_train + setting.n) {
        CalibrationSample cs;
        cs.z = ZValue::cat(z + 1);
        cs.y = y;
        data.calib.push_back(cs);
        data.calib_x.push_back({x});
      } else {
        TestSample ts;
        ts.z = ZValue::cat(z + 1);
        data.test.push_back(ts);
        data.test_x.push_back({x});
        data.truth_y.push_back(y);
      }
    }
    return data;
  }

  for (int i = 0; i < total; ++i) {
    std::vector<double> x(setting.x_dim);
    if (setting.id == "s1") {
      const int comp = draw_class({0.2, 0.2, 0.2, 0.2, 0.2}, rng);
      for (int k = 0; k < 3; ++k)
        x[k] = kS1Means[comp][k] + 0.5 * gauss(rng);  // covariance I/4
    } else {
      for (int k = 0; k < setting.x_dim; ++k) x[k] = gauss(rng);
    }
    const double y = regression_s(setting.id, x) + gauss(rng);
    if (i < setting.n_train) {
      data.train_x.push_back(x);
      data.train_y.push_back(y);
    } else if (i < setting.n_train + setting.n) {
      CalibrationSample cs;
      cs.z = ZValue::vec(x);
      cs.y = y;
      data.calib.push_back(cs);
      data.calib_x.push_back(x);
    } else {
      TestSample ts;
      ts.z = ZValue::vec(x);
      data.test.push_back(ts);
      data.test_x.push_back(x);
      data.truth_y.push_back(y);
    }
  }
  return data;
}

Eigen::VectorXd fit_ols(const std::vector<std::vector<double>>& x,
                        const std::vector<double>& y) {
  if (x.empty() || x.size() != y.size()) throw BadInput("fit_ols: bad data");
  const int d = static_cast<int>(x[0].size());
  Eigen::MatrixXd A(x.size(), d + 1);
  Eigen::VectorXd b(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    A(i, 0) = 1.0;
    for (int k = 0; k < d; ++k) A(i, k + 1) = x[i][k];
    b(i) = y[i];
  }
  return A.colPivHouseholderQr().solve(b);
}

double ols_predict(const Eigen::VectorXd& w, const std::vector<double>& x) {
  double v = w[0];
  for (std::size_t k = 0; k < x.size(); ++k) v += w[k + 1] * x[k];
  return v;
}

SimData simulate_with_predictor(const SimSetting& setting,
                                std::uint64_t replicate_seed) {
  SimData data = simulate(setting, replicate_seed);
  const Eigen::VectorXd w = fit_ols(data.train_x, data.train_y);
  for (std::size_t i = 0; i < data.calib.size(); ++i)
    data.calib[i].mu_hat = ols_predict(w, data.calib_x[i]);
  for (std::size_t i = 0; i < data.test.size(); ++i)
    data.test[i].mu_hat = ols_predict(w, data.test_x[i]);
  return data;
}

}  // namespace dacs
