// Test-time use of a trained robust regression: prediction under arbitrary
// missing patterns by restricting the saved worst-case moments, batch
// prediction with per-pattern caching, and feature-by-feature imputation.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "admm.hpp"
#include "masked.hpp"
#include "moments.hpp"
#include "saddle.hpp"

namespace drim {

enum class SolverKind { pga, nesterov, admm };

SolverKind solver_from_name(const std::string& name);
std::string solver_name(SolverKind kind);

struct RegressionModel {
  Eigen::VectorXd theta;
  Eigen::MatrixXd C;
  Eigen::VectorXd b;
  double lambda = 0.0;
  double mu_y = 0.0;  // target mean, the all-features-missing prediction
  std::vector<std::string> feature_names;
  std::string target_name;

  // Enforces theta = (C + lambda I)^-1 b to 1e-8.
  void validate() const;
};

struct TrainOptions {
  SolverKind solver = SolverKind::pga;
  double lambda = 0.1;
  double c = 2.0;
  int k = 30;
  double rho = 1.0;       // admm only
  int max_iters = 0;      // 0 = solver default
  double tol = 0.0;       // 0 = solver default
  std::uint64_t seed = 0;
  int threads = 1;
};

std::pair<RegressionModel, SolverReport> train_regression(const MaskedMatrix& X,
                                                          const MaskedVector& y,
                                                          const TrainOptions& opts);

// Train from a prebuilt envelope (mu_y comes from env.target_mean).
std::pair<RegressionModel, SolverReport> train_regression_from_envelope(
    const MomentEnvelope& env, const TrainOptions& opts);

// Complete row: theta' x. Otherwise solve the ridge system restricted to the
// available coordinates of the saved (C, b). No features: mu_y.
double predict(const RegressionModel& model, const Eigen::VectorXd& x, const BoolVector& avail);

// Equal to per-row predict; solves each distinct pattern once. solve_count,
// when given, receives the number of restricted solves performed.
Eigen::VectorXd predict_batch(const RegressionModel& model, const MaskedMatrix& m,
                              int* solve_count = nullptr);

struct ImputeOptions {
  SolverKind solver = SolverKind::pga;
  double lambda = 0.1;
  double c = 2.0;
  int k = 30;
  double rho = 1.0;
  std::uint64_t seed = 0;
  int threads = 1;
};

// Fills each column's missing cells from a robust regression of that column
// on all others; every column is imputed from the original matrix, so column
// order cannot matter. Available cells pass through unchanged.
MaskedMatrix impute(const MaskedMatrix& m, const ImputeOptions& opts);

void save_regression_model(const RegressionModel& model, const std::string& path,
                           const std::string& config_json = "");
RegressionModel load_regression_model(const std::string& path);

// SolverReport as JSON lines: one {"iteration", "g", "residual"} per iterate.
void save_trace(const SolverReport& report, const std::string& path);

}  // namespace drim
