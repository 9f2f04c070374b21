#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "dacs/score_state.hpp"

namespace dacs {

// Calibration schema: z (label) or z1..zd (numeric), mu_hat, y, optional c
// (per-row threshold, folded in as y - c). Test files omit y.
struct SampleTable {
  std::vector<CalibrationSample> calib;  // filled for calibration files
  std::vector<TestSample> test;          // filled for test files
  std::vector<std::string> z_labels;     // label per categorical level (1-based)
};

SampleTable read_calibration_csv(const std::string& path,
                                 std::vector<std::string>* label_pool);
SampleTable read_test_csv(const std::string& path,
                          std::vector<std::string>* label_pool);

void write_calibration_csv(const std::string& path,
                           const std::vector<CalibrationSample>& rows,
                           const std::vector<std::string>& labels);
void write_test_csv(const std::string& path,
                    const std::vector<TestSample>& rows,
                    const std::vector<std::string>& labels);

// Dense square matrix, comma separated, optional header row.
Eigen::MatrixXd read_matrix_csv(const std::string& path);

// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace dacs
