#include "saddle.hpp"

#include <chrono>
#include <cmath>

#include "errors.hpp"

namespace drim {

namespace {

void require_lambda(double lambda) {
  if (!(lambda > 0.0)) fail(ErrorCode::invalid_argument, "lambda must be positive");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// A singular inner solve mid-ascent means the adversary's iterate left the
// solvable region; surface it as divergence so the partial trace survives.
Eigen::VectorXd ridge_or_diverge(const Eigen::MatrixXd& C, const Eigen::VectorXd& b,
                                 double lambda, int iteration, SolverReport& report,
                                 std::chrono::steady_clock::time_point t0) {
  try {
    return ridge_solve(C, b, lambda);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::numeric) throw;
    report.wall_time_s = seconds_since(t0);
    throw DivergedError(std::string(e.what()) + " (iteration " + std::to_string(iteration) + ")",
                        std::move(report));
  }
}

}  // namespace

Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& C, const Eigen::VectorXd& b, double lambda) {
  require_lambda(lambda);
  if (C.rows() != C.cols() || C.rows() != b.size())
    fail(ErrorCode::invalid_argument, "ridge_solve: shape mismatch");
  if (!C.allFinite() || !b.allFinite())
    fail(ErrorCode::numeric, "ridge_solve: non-finite input");
  Eigen::MatrixXd A = C;
  A.diagonal().array() += lambda;
  Eigen::VectorXd theta = A.partialPivLu().solve(b);
  if (!theta.allFinite()) fail(ErrorCode::numeric, "ridge_solve: singular system");
  return theta;
}

double eval_g(const Eigen::MatrixXd& C, const Eigen::VectorXd& b, double lambda) {
  return -b.dot(ridge_solve(C, b, lambda));
}

Eigen::MatrixXd box_project(const Eigen::MatrixXd& m, const Eigen::MatrixXd& center,
                            const Eigen::MatrixXd& radius) {
  if (m.rows() != center.rows() || m.cols() != center.cols() || m.rows() != radius.rows() ||
      m.cols() != radius.cols())
    fail(ErrorCode::invalid_argument, "box_project: shape mismatch");
  return clamp_box(m, center - radius, center + radius);
}

Eigen::MatrixXd clamp_box(const Eigen::MatrixXd& m, const Eigen::MatrixXd& lo,
                          const Eigen::MatrixXd& hi) {
  return m.cwiseMax(lo).cwiseMin(hi);
}

Eigen::VectorXd clamp_box(const Eigen::VectorXd& v, const Eigen::VectorXd& lo,
                          const Eigen::VectorXd& hi) {
  return v.cwiseMax(lo).cwiseMin(hi);
}

std::pair<SaddleState, SolverReport> pga_solve(const MomentEnvelope& env, double lambda,
                                               const AscentOptions& opts) {
  require_lambda(lambda);
  if (opts.max_iters < 1) fail(ErrorCode::invalid_argument, "pga_solve: max_iters must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  const Eigen::MatrixXd c_lo = env.c_min(), c_hi = env.c_max();
  const Eigen::VectorXd b_lo = env.b_min(), b_hi = env.b_max();
  const double alpha = opts.step.value_or(lambda / 2.0);

  Eigen::MatrixXd C = clamp_box(env.C0, c_lo, c_hi);
  Eigen::VectorXd b = clamp_box(env.b0, b_lo, b_hi);
  Eigen::VectorXd theta = ridge_solve(C, b, lambda);

  SolverReport report;
  report.g_history.push_back(-b.dot(theta));
  for (int t = 0; t < opts.max_iters; ++t) {
    C = clamp_box(C + alpha * (theta * theta.transpose()), c_lo, c_hi);
    b = clamp_box(b - 2.0 * alpha * theta, b_lo, b_hi);
    theta = ridge_or_diverge(C, b, lambda, t + 1, report, t0);
    const double g = -b.dot(theta);
    const double prev = report.g_history.back();
    report.g_history.push_back(g);
    report.iterations = t + 1;
    report.final_gap = std::abs(g - prev);
    if (opts.tol > 0.0 && report.final_gap <= opts.tol * std::max(1.0, std::abs(g))) {
      report.converged = true;
      break;
    }
  }
  report.wall_time_s = seconds_since(t0);
  return {SaddleState{std::move(theta), std::move(C), std::move(b), lambda}, std::move(report)};
}

std::pair<SaddleState, SolverReport> nesterov_solve(const MomentEnvelope& env, double lambda,
                                                    const AscentOptions& opts) {
  require_lambda(lambda);
  if (opts.max_iters < 1)
    fail(ErrorCode::invalid_argument, "nesterov_solve: max_iters must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  const Eigen::MatrixXd c_lo = env.c_min(), c_hi = env.c_max();
  const Eigen::VectorXd b_lo = env.b_min(), b_hi = env.b_max();
  const double alpha = opts.step.value_or(lambda / 2.0);

  Eigen::MatrixXd C = clamp_box(env.C0, c_lo, c_hi);
  Eigen::VectorXd b = clamp_box(env.b0, b_lo, b_hi);
  Eigen::MatrixXd C_prev = C;
  Eigen::VectorXd b_prev = b;
  double gamma = 1.0;

  SolverReport report;
  report.g_history.push_back(eval_g(C, b, lambda));
  for (int t = 0; t < opts.max_iters; ++t) {
    const double gamma_next = (1.0 + std::sqrt(1.0 + 4.0 * gamma * gamma)) / 2.0;
    const double beta = (gamma - 1.0) / gamma_next;
    // Gradient evaluated at the extrapolated point, then projected back.
    const Eigen::MatrixXd yc = C + beta * (C - C_prev);
    const Eigen::VectorXd yb = b + beta * (b - b_prev);
    const Eigen::VectorXd theta_y = ridge_or_diverge(yc, yb, lambda, t + 1, report, t0);
    C_prev = C;
    b_prev = b;
    C = clamp_box(yc + alpha * (theta_y * theta_y.transpose()), c_lo, c_hi);
    b = clamp_box(yb - 2.0 * alpha * theta_y, b_lo, b_hi);
    gamma = gamma_next;
    const double g = eval_g(C, b, lambda);
    const double prev = report.g_history.back();
    report.g_history.push_back(g);
    report.iterations = t + 1;
    report.final_gap = std::abs(g - prev);
    if (opts.tol > 0.0 && report.final_gap <= opts.tol * std::max(1.0, std::abs(g))) {
      report.converged = true;
      break;
    }
  }
  report.wall_time_s = seconds_since(t0);
  Eigen::VectorXd theta = ridge_solve(C, b, lambda);
  return {SaddleState{std::move(theta), std::move(C), std::move(b), lambda}, std::move(report)};
}

}  // namespace drim
