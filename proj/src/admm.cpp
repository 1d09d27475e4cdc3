#include "admm.hpp"

#include <chrono>
#include <cmath>

#include "errors.hpp"

namespace drim {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void require_rho(double rho) {
  if (!(rho > 0.0)) fail(ErrorCode::invalid_argument, "rho must be positive");
}

}  // namespace

Eigen::MatrixXd psd_project(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols()) fail(ErrorCode::invalid_argument, "psd_project: matrix not square");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    fail(ErrorCode::invalid_argument, "psd_project: input asymmetric beyond tolerance");
  const Eigen::MatrixXd sym = (s + s.transpose()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) fail(ErrorCode::numeric, "psd_project: eigensolver failed");
  const Eigen::VectorXd clamped = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
}

Eigen::VectorXd ellipsoid_project(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& G) {
  if (G.rows() != G.cols() || G.rows() != alpha.size())
    fail(ErrorCode::invalid_argument, "ellipsoid_project: shape mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig((G + G.transpose()) / 2.0);
  if (eig.info() != Eigen::Success)
    fail(ErrorCode::numeric, "ellipsoid_project: eigensolver failed");
  Eigen::VectorXd w = eig.eigenvalues();
  if (w.minCoeff() < -1e-8)
    fail(ErrorCode::invalid_argument, "ellipsoid_project: G is not positive semidefinite");
  w = w.cwiseMax(0.0);
  const Eigen::MatrixXd& U = eig.eigenvectors();
  const Eigen::VectorXd gamma = U.transpose() * alpha;

  const double w_max = w.size() > 0 ? w.maxCoeff() : 0.0;
  const double zero_tol = 1e-12 * std::max(1.0, w_max);
  double s0 = 0.0;
  bool null_mass = false;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) > zero_tol)
      s0 += gamma(i) * gamma(i) / w(i);
    else if (gamma(i) != 0.0)
      null_mass = true;
  }

  if (s0 <= 1.0 && !null_mass) return alpha;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(w.size());
  if (s0 <= 1.0) {
    // Only the null-space component violates the constraint; drop it.
    for (Eigen::Index i = 0; i < w.size(); ++i)
      if (w(i) > zero_tol) beta(i) = gamma(i);
    return U * beta;
  }

  // Bisection on mu >= 0 for sum gamma_i^2 w_i / (w_i + mu)^2 = 1; the sum is
  // strictly decreasing in mu.
  const auto constraint = [&](double mu) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
      if (w(i) > zero_tol) {
        const double q = w(i) + mu;
        acc += gamma(i) * gamma(i) * w(i) / (q * q);
      }
    return acc;
  };
  double hi = 1.0;
  while (constraint(hi) > 1.0) hi *= 2.0;
  double lo = 0.0;
  double mid = hi / 2.0;
  for (int it = 0; it < 200; ++it) {
    mid = (lo + hi) / 2.0;
    const double v = constraint(mid);
    if (std::abs(v - 1.0) <= 1e-12) break;
    if (v > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) > zero_tol) beta(i) = gamma(i) * w(i) / (w(i) + mid);
  return U * beta;
}

namespace admm_detail {

void solve_theta_de_block(const Eigen::VectorXd& theta_prime, const Eigen::VectorXd& d_prime,
                          const Eigen::VectorXd& e_prime, const Eigen::VectorXd& mu_theta,
                          const Eigen::VectorXd& mu_d, const Eigen::VectorXd& mu_e,
                          const Eigen::VectorXd& eta, const Eigen::VectorXd& b_lo,
                          const Eigen::VectorXd& b_hi, double lambda, double rho,
                          Eigen::VectorXd* theta, Eigen::VectorXd* d, Eigen::VectorXd* e) {
  // Stationarity of the augmented Lagrangian in (theta, d, e) decouples per
  // coordinate into a 3x3 system; this is its explicit inverse applied to the
  // right-hand sides r.
  const double den = 6.0 * lambda + 7.0 * rho;
  const Eigen::VectorXd r_theta = rho * theta_prime - mu_theta - 2.0 * eta;
  const Eigen::VectorXd r_d = b_lo - mu_d + rho * d_prime + eta;
  const Eigen::VectorXd r_e = -b_hi - mu_e + rho * e_prime - eta;
  *theta = (3.0 * r_theta + 2.0 * r_d - 2.0 * r_e) / den;
  *d = (2.0 * r_theta + (4.0 * lambda + 6.0 * rho) / rho * r_d +
        (2.0 * lambda + rho) / rho * r_e) /
       den;
  *e = (-2.0 * r_theta + (2.0 * lambda + rho) / rho * r_d +
        (4.0 * lambda + 6.0 * rho) / rho * r_e) /
       den;
}

void solve_ab_block(const Eigen::MatrixXd& A_prime, const Eigen::MatrixXd& B_prime,
                    const Eigen::MatrixXd& G, const Eigen::MatrixXd& Gamma,
                    const Eigen::MatrixXd& M_A, const Eigen::MatrixXd& M_B,
                    const Eigen::MatrixXd& c_lo, const Eigen::MatrixXd& c_hi, double rho,
                    Eigen::MatrixXd* A, Eigen::MatrixXd* B) {
  const Eigen::MatrixXd D1 = rho * A_prime - rho * G + Gamma - M_A + c_lo;
  const Eigen::MatrixXd D2 = rho * B_prime + rho * G - Gamma - M_B - c_hi;
  *A = (2.0 * D1 + D2) / (3.0 * rho);
  *B = (D1 + 2.0 * D2) / (3.0 * rho);
}

}  // namespace admm_detail

DualState admm_init(const MomentEnvelope& env, double lambda,
                    const std::optional<std::pair<Eigen::MatrixXd, Eigen::VectorXd>>& init) {
  if (!(lambda > 0.0)) fail(ErrorCode::invalid_argument, "lambda must be positive");
  const Eigen::Index d = env.dim();
  const Eigen::MatrixXd c_lo = env.c_min(), c_hi = env.c_max();
  const Eigen::VectorXd b_lo = env.b_min(), b_hi = env.b_max();

  DualState s;
  const Eigen::MatrixXd c_init = clamp_box(init ? init->first : env.C0, c_lo, c_hi);
  const Eigen::VectorXd b_init = clamp_box(init ? init->second : env.b0, b_lo, b_hi);
  s.theta = ridge_solve(c_init, b_init, lambda);
  s.d = (2.0 * s.theta).cwiseMax(0.0);
  s.e = (-2.0 * s.theta).cwiseMax(0.0);
  s.G = s.theta * s.theta.transpose();
  s.B = s.G.cwiseMax(0.0);
  s.A = (-s.G).cwiseMax(0.0);
  s.A_prime = s.A;
  s.B_prime = s.B;
  s.d_prime = s.d;
  s.e_prime = s.e;
  s.theta_prime = s.theta;
  s.M_A = Eigen::MatrixXd::Zero(d, d);
  s.M_B = Eigen::MatrixXd::Zero(d, d);
  s.Gamma = Eigen::MatrixXd::Zero(d, d);
  s.mu_d = Eigen::VectorXd::Zero(d);
  s.mu_e = Eigen::VectorXd::Zero(d);
  s.mu_theta = Eigen::VectorXd::Zero(d);
  s.eta = Eigen::VectorXd::Zero(d);
  return s;
}

double admm_step(DualState& s, const MomentEnvelope& env, double lambda, double rho) {
  require_rho(rho);
  if (!(lambda > 0.0)) fail(ErrorCode::invalid_argument, "lambda must be positive");
  const Eigen::MatrixXd c_lo = env.c_min(), c_hi = env.c_max();
  const Eigen::VectorXd b_lo = env.b_min(), b_hi = env.b_max();

  // First block, against the current copies.
  admm_detail::solve_theta_de_block(s.theta_prime, s.d_prime, s.e_prime, s.mu_theta, s.mu_d,
                                    s.mu_e, s.eta, b_lo, b_hi, lambda, rho, &s.theta, &s.d,
                                    &s.e);
  const Eigen::MatrixXd tp_outer = s.theta_prime * s.theta_prime.transpose();
  s.G = psd_project(s.B - s.A + s.Gamma / rho - tp_outer) + tp_outer;
  s.A_prime = (s.A + s.M_A / rho).cwiseMax(0.0);
  s.B_prime = (s.B + s.M_B / rho).cwiseMax(0.0);

  // Second block, against the freshly updated first block.
  s.d_prime = (s.d + s.mu_d / rho).cwiseMax(0.0);
  s.e_prime = (s.e + s.mu_e / rho).cwiseMax(0.0);
  s.theta_prime = ellipsoid_project(s.theta + s.mu_theta / rho, s.G);
  admm_detail::solve_ab_block(s.A_prime, s.B_prime, s.G, s.Gamma, s.M_A, s.M_B, c_lo, c_hi, rho,
                              &s.A, &s.B);

  // Multiplier ascent on all seven coupling constraints.
  s.M_A += rho * (s.A - s.A_prime);
  s.M_B += rho * (s.B - s.B_prime);
  s.mu_d += rho * (s.d - s.d_prime);
  s.mu_e += rho * (s.e - s.e_prime);
  s.mu_theta += rho * (s.theta - s.theta_prime);
  s.eta += rho * (2.0 * s.theta - s.d + s.e);
  s.Gamma += rho * (s.B - s.A - s.G);

  const double residual = (s.A - s.A_prime).norm() + (s.B - s.B_prime).norm() +
                          (s.d - s.d_prime).norm() + (s.e - s.e_prime).norm() +
                          (s.theta - s.theta_prime).norm() +
                          (2.0 * s.theta - s.d + s.e).norm() + (s.B - s.A - s.G).norm();
  if (!std::isfinite(residual))
    fail(ErrorCode::diverged, "admm_step: non-finite residual");
  return residual;
}

std::pair<SaddleState, SolverReport> admm_solve(const MomentEnvelope& env, double lambda,
                                                const AdmmConfig& cfg) {
  require_rho(cfg.rho);
  if (cfg.max_iters < 1) fail(ErrorCode::invalid_argument, "admm_solve: max_iters must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::MatrixXd c_lo = env.c_min(), c_hi = env.c_max();
  const Eigen::VectorXd b_lo = env.b_min(), b_hi = env.b_max();

  DualState s = admm_init(env, lambda, cfg.init);
  SolverReport report;
  report.residuals.reserve(64);
  for (int t = 0; t < cfg.max_iters; ++t) {
    double res;
    try {
      res = admm_step(s, env, lambda, cfg.rho);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::diverged) {
        report.final_gap = report.residuals.empty() ? 0.0 : report.residuals.back();
        report.wall_time_s = seconds_since(t0);
        throw DivergedError(
            std::string(e.what()) + " (iteration " + std::to_string(t + 1) + ")",
            std::move(report));
      }
      throw;
    }
    report.residuals.push_back(res);
    // Objective at the current multiplier-recovered box point; the trace the
    // CLI emits alongside the residuals.
    const Eigen::MatrixXd c_now =
        clamp_box(Eigen::MatrixXd(-(s.Gamma + s.Gamma.transpose()) / 2.0), c_lo, c_hi);
    const Eigen::VectorXd b_now = clamp_box(Eigen::VectorXd(-s.eta), b_lo, b_hi);
    report.g_history.push_back(eval_g(c_now, b_now, lambda));
    report.iterations = t + 1;
    if (res <= cfg.tol) {
      report.converged = true;
      break;
    }
  }
  report.final_gap = report.residuals.empty() ? 0.0 : report.residuals.back();
  report.wall_time_s = seconds_since(t0);

  // The box faces a maximizer leans on are encoded in the signs of the box
  // multipliers; clamping their symmetrized negation into the box recovers
  // the worst-case (C, b), and theta is re-solved there so the returned state
  // satisfies the saddle certificate exactly.
  SaddleState state;
  state.lambda = lambda;
  state.C = clamp_box(Eigen::MatrixXd(-(s.Gamma + s.Gamma.transpose()) / 2.0), c_lo, c_hi);
  state.b = clamp_box(Eigen::VectorXd(-s.eta), b_lo, b_hi);
  state.theta = ridge_solve(state.C, state.b, lambda);
  return {std::move(state), std::move(report)};
}

double dual_objective(const Eigen::VectorXd& theta, const Eigen::VectorXd& d,
                      const Eigen::VectorXd& e, const Eigen::MatrixXd& A,
                      const Eigen::MatrixXd& B, const Eigen::VectorXd& b_lo,
                      const Eigen::VectorXd& b_hi, const Eigen::MatrixXd& c_lo,
                      const Eigen::MatrixXd& c_hi, double lambda) {
  return lambda * theta.squaredNorm() - b_lo.dot(d) + b_hi.dot(e) -
         c_lo.cwiseProduct(A).sum() + c_hi.cwiseProduct(B).sum();
}

}  // namespace drim
