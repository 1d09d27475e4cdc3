#include "masked.hpp"

#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "errors.hpp"

namespace drim {

namespace {

constexpr double kMissingSentinel = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  if (fields.empty()) fields.emplace_back();
  return fields;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

MaskedMatrix MaskedMatrix::dense(const Eigen::MatrixXd& values) {
  MaskedMatrix m;
  m.values = values;
  m.mask = BoolArray::Constant(values.rows(), values.cols(), true);
  m.column_names.reserve(static_cast<std::size_t>(values.cols()));
  for (Eigen::Index j = 0; j < values.cols(); ++j)
    m.column_names.push_back("x" + std::to_string(j));
  return m;
}

void MaskedMatrix::validate() const {
  if (values.rows() != mask.rows() || values.cols() != mask.cols())
    fail(ErrorCode::invalid_argument, "mask and values dimensions differ");
  if (static_cast<Eigen::Index>(column_names.size()) != values.cols())
    fail(ErrorCode::invalid_argument, "column name count does not match width");
  for (Eigen::Index i = 0; i < rows(); ++i)
    for (Eigen::Index j = 0; j < cols(); ++j)
      if (mask(i, j) && !std::isfinite(values(i, j)))
        fail(ErrorCode::numeric, "non-finite value at available cell (" +
                                     std::to_string(i) + "," + std::to_string(j) + ")");
}

std::size_t MaskedMatrix::available_count() const {
  return static_cast<std::size_t>(mask.cast<int>().sum());
}

double MaskedMatrix::missing_fraction() const {
  const auto total = static_cast<double>(rows() * cols());
  if (total == 0) return 0.0;
  return 1.0 - static_cast<double>(available_count()) / total;
}

int MaskedMatrix::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < column_names.size(); ++j)
    if (column_names[j] == name) return static_cast<int>(j);
  return -1;
}

MaskedMatrix MaskedMatrix::drop_column(Eigen::Index j) const {
  assert(j >= 0 && j < cols());
  MaskedMatrix out;
  out.values.resize(rows(), cols() - 1);
  out.mask.resize(rows(), cols() - 1);
  for (Eigen::Index k = 0, t = 0; k < cols(); ++k) {
    if (k == j) continue;
    out.values.col(t) = values.col(k);
    out.mask.col(t) = mask.col(k);
    out.column_names.push_back(column_names[static_cast<std::size_t>(k)]);
    ++t;
  }
  return out;
}

std::size_t MaskedVector::available_count() const {
  return static_cast<std::size_t>(mask.cast<int>().sum());
}

MaskedVector column_of(const MaskedMatrix& m, Eigen::Index j) {
  assert(j >= 0 && j < m.cols());
  return MaskedVector{m.values.col(j), m.mask.col(j)};
}

MaskedMatrix load_csv(const std::string& path, const std::string& missing_token) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::parse, path + ": empty file");
  if (!line.empty() && line.front() == '\xEF' && line.size() >= 3 &&
      line[1] == '\xBB' && line[2] == '\xBF')
    line.erase(0, 3);

  MaskedMatrix m;
  for (const auto& name : split_line(line)) m.column_names.push_back(trim(name));
  const auto d = static_cast<Eigen::Index>(m.column_names.size());

  std::vector<double> values;
  std::vector<bool> avail;
  Eigen::Index n = 0;
  while (std::getline(in, line)) {
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    const auto fields = split_line(line);
    if (static_cast<Eigen::Index>(fields.size()) != d)
      fail(ErrorCode::parse, path + ": row " + std::to_string(n + 2) + " has " +
                                 std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(d));
    for (Eigen::Index j = 0; j < d; ++j) {
      const std::string cell = trim(fields[static_cast<std::size_t>(j)]);
      if (cell.empty() || cell == missing_token) {
        values.push_back(kMissingSentinel);
        avail.push_back(false);
        continue;
      }
      double v = 0.0;
      const auto* first = cell.data();
      const auto* last = cell.data() + cell.size();
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last || !std::isfinite(v))
        fail(ErrorCode::parse, path + ": unparsable cell '" + cell + "' at row " +
                                   std::to_string(n + 2) + ", column " +
                                   m.column_names[static_cast<std::size_t>(j)]);
      values.push_back(v);
      avail.push_back(true);
    }
    ++n;
  }

  m.values.resize(n, d);
  m.mask.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      m.values(i, j) = values[static_cast<std::size_t>(i * d + j)];
      m.mask(i, j) = avail[static_cast<std::size_t>(i * d + j)];
    }
  return m;
}

void save_csv(const MaskedMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  for (std::size_t j = 0; j < m.column_names.size(); ++j) {
    if (j) out << ',';
    out << m.column_names[j];
  }
  out << '\n';
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      if (!m.mask(i, j)) continue;
      std::snprintf(buf, sizeof buf, "%.17g", m.values(i, j));
      out << buf;
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::io, "write failed for " + path);
}

std::map<std::vector<bool>, std::vector<Eigen::Index>> pattern_groups(const MaskedMatrix& m) {
  std::map<std::vector<bool>, std::vector<Eigen::Index>> groups;
  std::vector<bool> key(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) key[static_cast<std::size_t>(j)] = m.mask(i, j);
    groups[key].push_back(i);
  }
  return groups;
}

double nrmse(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
  if (y_true.size() != y_pred.size())
    fail(ErrorCode::invalid_argument, "nrmse: length mismatch");
  if (y_true.size() < 2) fail(ErrorCode::invalid_argument, "nrmse: need at least 2 points");
  const double mean = y_true.mean();
  const double denom = std::sqrt((y_true.array() - mean).square().mean());
  if (denom == 0.0) fail(ErrorCode::numeric, "nrmse: constant ground truth");
  const double num = std::sqrt((y_true - y_pred).array().square().mean());
  return num / denom;
}

}  // namespace drim
