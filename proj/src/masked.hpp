// Masked-matrix data model: numeric matrices with per-cell availability,
// CSV ingestion/emission, missing-pattern grouping, and the NRMSE metric.
#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace drim {

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using BoolVector = Eigen::Array<bool, Eigen::Dynamic, 1>;

// n x d values plus an availability mask. The mask is authoritative; cells
// with mask false hold quiet NaN and must never be read as data.
struct MaskedMatrix {
  Eigen::MatrixXd values;
  BoolArray mask;
  std::vector<std::string> column_names;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  // All-available matrix with default column names x0..x{d-1}.
  static MaskedMatrix dense(const Eigen::MatrixXd& values);

  // Throws if mask/values shapes disagree, names are off, or an available
  // cell is non-finite.
  void validate() const;

  std::size_t available_count() const;
  double missing_fraction() const;

  int column_index(const std::string& name) const;  // -1 when absent

  // Copy without column j (values, mask, names).
  MaskedMatrix drop_column(Eigen::Index j) const;
};

// Single column with availability, used for regression targets and labels.
struct MaskedVector {
  Eigen::VectorXd values;
  BoolVector mask;

  Eigen::Index size() const { return values.size(); }
  std::size_t available_count() const;
};

MaskedVector column_of(const MaskedMatrix& m, Eigen::Index j);

// CSV with a header row; a cell is missing when empty or equal to
// missing_token. Throws Error{parse} naming row/column on bad cells and
// Error{parse} on ragged rows.
MaskedMatrix load_csv(const std::string& path, const std::string& missing_token = "NA");

// Missing cells are written as empty fields; values use enough digits to
// round-trip exactly.
void save_csv(const MaskedMatrix& m, const std::string& path);

// Groups row indices by their availability pattern. Deterministic order
// (lexicographic in the pattern bits).
std::map<std::vector<bool>, std::vector<Eigen::Index>> pattern_groups(const MaskedMatrix& m);

// RMSE(y_pred) / RMSE(mean predictor). Throws on length mismatch, length < 2,
// or constant y_true.
double nrmse(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred);

}  // namespace drim
