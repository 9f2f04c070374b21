#include "dacs/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dacs {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
      field.pop_back();
    std::size_t b = 0;
    while (b < field.size() && field[b] == ' ') ++b;
    out.push_back(field.substr(b));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool parse_num(const std::string& s, double& v) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  return ec == std::errc() && p == e;
}

struct Schema {
  int col_mu = -1, col_y = -1, col_c = -1, col_zlabel = -1;
  std::vector<int> col_zvec;
};

Schema parse_header(const std::vector<std::string>& header,
                    const std::string& path) {
  Schema s;
  for (int j = 0; j < static_cast<int>(header.size()); ++j) {
    const std::string& h = header[j];
    if (h == "mu_hat")
      s.col_mu = j;
    else if (h == "y")
      s.col_y = j;
    else if (h == "c")
      s.col_c = j;
    else if (h == "z")
      s.col_zlabel = j;
    else if (h.size() >= 2 && h[0] == 'z' &&
             std::all_of(h.begin() + 1, h.end(), ::isdigit))
      s.col_zvec.push_back(j);
  }
  if (s.col_mu < 0) throw BadInput(path + ": missing mu_hat column");
  if (s.col_zlabel < 0 && s.col_zvec.empty())
    throw BadInput(path + ": missing z or z1..zd columns");
  return s;
}

int label_to_category(const std::string& label,
                      std::vector<std::string>* pool) {
  auto it = std::find(pool->begin(), pool->end(), label);
  if (it == pool->end()) {
    pool->push_back(label);
    return static_cast<int>(pool->size());
  }
  return static_cast<int>(it - pool->begin()) + 1;
}

ZValue parse_z(const Schema& s, const std::vector<std::string>& row,
               std::vector<std::string>* pool, const std::string& path) {
  if (s.col_zlabel >= 0) return ZValue::cat(label_to_category(row[s.col_zlabel], pool));
  std::vector<double> coords;
  coords.reserve(s.col_zvec.size());
  for (int j : s.col_zvec) {
    double v;
    if (!parse_num(row[j], v)) throw BadInput(path + ": bad z value");
    coords.push_back(v);
  }
  return ZValue::vec(std::move(coords));
}

double field_num(const std::vector<std::string>& row, int j,
                 const std::string& path, const char* what) {
  if (j >= static_cast<int>(row.size()))
    throw BadInput(path + ": short row");
  double v;
  if (!parse_num(row[j], v))
    throw BadInput(path + ": bad " + std::string(what) + " value '" + row[j] +
                   "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back;
  if (parse_num(buf, back) && back == v) {
    // Try shorter forms.
    for (int prec = 1; prec <= 16; ++prec) {
      char cand[40];
      std::snprintf(cand, sizeof(cand), "%.*g", prec, v);
      double b2;
      if (parse_num(cand, b2) && b2 == v) return cand;
    }
  }
  return buf;
}

SampleTable read_calibration_csv(const std::string& path,
                                 std::vector<std::string>* label_pool) {
  std::ifstream in(path);
  if (!in) throw BadInput("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw BadInput(path + ": empty file");
  const Schema s = parse_header(split_line(line), path);
  if (s.col_y < 0) throw BadInput(path + ": calibration file needs y");
  SampleTable t;
  std::vector<std::string> local_pool;
  auto* pool = label_pool ? label_pool : &local_pool;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto row = split_line(line);
    CalibrationSample cs;
    cs.z = parse_z(s, row, pool, path);
    cs.mu_hat = field_num(row, s.col_mu, path, "mu_hat");
    cs.y = field_num(row, s.col_y, path, "y");
    if (s.col_c >= 0) cs.y -= field_num(row, s.col_c, path, "c");
    if (!std::isfinite(cs.mu_hat)) throw BadInput(path + ": mu_hat not finite");
    t.calib.push_back(std::move(cs));
  }
  t.z_labels = *pool;
  return t;
}

SampleTable read_test_csv(const std::string& path,
                          std::vector<std::string>* label_pool) {
  std::ifstream in(path);
  if (!in) throw BadInput("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw BadInput(path + ": empty file");
  const Schema s = parse_header(split_line(line), path);
  SampleTable t;
  std::vector<std::string> local_pool;
  auto* pool = label_pool ? label_pool : &local_pool;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto row = split_line(line);
    TestSample ts;
    ts.z = parse_z(s, row, pool, path);
    ts.mu_hat = field_num(row, s.col_mu, path, "mu_hat");
    if (!std::isfinite(ts.mu_hat)) throw BadInput(path + ": mu_hat not finite");
    t.test.push_back(std::move(ts));
  }
  t.z_labels = *pool;
  return t;
}

namespace {

void write_z_header(std::ofstream& out, const ZValue& z) {
  if (z.is_categorical()) {
    out << "z";
  } else {
    for (std::size_t k = 0; k < z.coords.size(); ++k)
      out << (k ? "," : "") << "z" << (k + 1);
  }
}

void write_z_row(std::ofstream& out, const ZValue& z,
                 const std::vector<std::string>& labels) {
  if (z.is_categorical()) {
    out << labels.at(z.category - 1);
  } else {
    for (std::size_t k = 0; k < z.coords.size(); ++k)
      out << (k ? "," : "") << format_double(z.coords[k]);
  }
}

}  // namespace

void write_calibration_csv(const std::string& path,
                           const std::vector<CalibrationSample>& rows,
                           const std::vector<std::string>& labels) {
  std::ofstream out(path);
  if (!out) throw BadInput("cannot write " + path);
  if (rows.empty()) throw BadInput("write_calibration_csv: no rows");
  write_z_header(out, rows[0].z);
  out << ",mu_hat,y\n";
  for (const auto& r : rows) {
    write_z_row(out, r.z, labels);
    out << "," << format_double(r.mu_hat) << "," << format_double(r.y) << "\n";
  }
}

void write_test_csv(const std::string& path,
                    const std::vector<TestSample>& rows,
                    const std::vector<std::string>& labels) {
  std::ofstream out(path);
  if (!out) throw BadInput("cannot write " + path);
  if (rows.empty()) throw BadInput("write_test_csv: no rows");
  write_z_header(out, rows[0].z);
  out << ",mu_hat\n";
  for (const auto& r : rows) {
    write_z_row(out, r.z, labels);
    out << "," << format_double(r.mu_hat) << "\n";
  }
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadInput("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_line(line);
    std::vector<double> vals;
    vals.reserve(fields.size());
    bool numeric = true;
    for (const auto& f : fields) {
      double v;
      if (!parse_num(f, v)) {
        numeric = false;
        break;
      }
      vals.push_back(v);
    }
    if (!numeric) {
      if (first) {  // header row
        first = false;
        continue;
      }
      throw BadInput(path + ": non-numeric matrix entry");
    }
    first = false;
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw BadInput(path + ": empty matrix");
  Eigen::MatrixXd mat(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw BadInput(path + ": ragged matrix");
    for (std::size_t j = 0; j < rows[i].size(); ++j) mat(i, j) = rows[i][j];
  }
  return mat;
}

}  // namespace dacs
