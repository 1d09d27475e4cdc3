// Box-relaxed robust regression saddle problem. The inner minimization has
// the closed form theta = (C + lambda I)^-1 b, so the outer maximization of
// the concave g(C, b) = -b' (C + lambda I)^-1 b runs by projected gradient
// ascent over the moment box, plain or Nesterov-accelerated.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "moments.hpp"

namespace drim {

struct SaddleState {
  Eigen::VectorXd theta;
  Eigen::MatrixXd C;
  Eigen::VectorXd b;
  double lambda = 0.0;
};

struct SolverReport {
  int iterations = 0;
  std::vector<double> g_history;    // one entry per iterate, nonempty
  std::vector<double> residuals;    // admm only; empty for ascent solvers
  double final_gap = 0.0;           // last successive-iterate g change
  bool converged = false;
  double wall_time_s = 0.0;
};

struct AscentOptions {
  int max_iters = 10000;
  double tol = 1e-9;                // relative g improvement
  std::optional<double> step;       // default 1/L = lambda/2
};

// Divergence carries the partial trace so callers can still persist it.
class DivergedError : public Error {
 public:
  DivergedError(const std::string& message, SolverReport partial)
      : Error(ErrorCode::diverged, message), report(std::move(partial)) {}

  SolverReport report;
};

// Minimizer of theta' C theta - 2 b' theta + lambda |theta|^2, via a linear
// solve of (C + lambda I) theta = b.
Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& C, const Eigen::VectorXd& b, double lambda);

// Inner minimum value -b' (C + lambda I)^-1 b.
double eval_g(const Eigen::MatrixXd& C, const Eigen::VectorXd& b, double lambda);

// Elementwise clamp into [center - radius, center + radius].
Eigen::MatrixXd box_project(const Eigen::MatrixXd& m, const Eigen::MatrixXd& center,
                            const Eigen::MatrixXd& radius);

// Elementwise clamp into [lo, hi]; the form the solvers use internally.
Eigen::MatrixXd clamp_box(const Eigen::MatrixXd& m, const Eigen::MatrixXd& lo,
                          const Eigen::MatrixXd& hi);
Eigen::VectorXd clamp_box(const Eigen::VectorXd& v, const Eigen::VectorXd& lo,
                          const Eigen::VectorXd& hi);

std::pair<SaddleState, SolverReport> pga_solve(const MomentEnvelope& env, double lambda,
                                               const AscentOptions& opts = {});

std::pair<SaddleState, SolverReport> nesterov_solve(const MomentEnvelope& env, double lambda,
                                                    const AscentOptions& opts = {});

}  // namespace drim
