// Dual solver that honors the positive-semidefinite constraint on C. The
// boxed saddle problem is dualized into separable blocks (theta, d, e),
// (G, copies), and (A, B), coupled by linear constraints; ADMM alternates
// closed-form block minimizations, a PSD cone projection, an ellipsoid
// projection, and multiplier ascent.
#pragma once

#include <Eigen/Dense>
#include <optional>

#include "saddle.hpp"

namespace drim {

// Eigendecompose, clamp negative eigenvalues to zero, reconstruct. The input
// must be symmetric up to roundoff.
Eigen::MatrixXd psd_project(const Eigen::MatrixXd& s);

// Projection of alpha onto {x : x x' <= G} for PSD G: in the eigenbasis of G
// the constraint reads sum gamma_i^2 / lambda_i <= 1, solved by bisection on
// the Lagrange multiplier. Components along zero eigenvalues are dropped.
Eigen::VectorXd ellipsoid_project(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& G);

// All primal blocks, copies, and multipliers of the dual iteration.
struct DualState {
  Eigen::VectorXd theta, d, e;              // block 1
  Eigen::MatrixXd G, A_prime, B_prime;      // block 1 (copies of A, B)
  Eigen::VectorXd d_prime, e_prime, theta_prime;  // block 2 copies
  Eigen::MatrixXd A, B;                     // block 2
  Eigen::MatrixXd M_A, M_B, Gamma;          // multipliers (matrix constraints)
  Eigen::VectorXd mu_d, mu_e, mu_theta, eta;  // multipliers (vector constraints)
};

struct AdmmConfig {
  double rho = 1.0;
  int max_iters = 20000;
  double tol = 1e-6;  // combined constraint residual
  // Starting box point; defaults to the clamped point estimates.
  std::optional<std::pair<Eigen::MatrixXd, Eigen::VectorXd>> init;
};

// Feasible start: theta from the ridge solution at a box point, auxiliary
// blocks set so every coupling constraint holds exactly, multipliers zero.
DualState admm_init(const MomentEnvelope& env, double lambda,
                    const std::optional<std::pair<Eigen::MatrixXd, Eigen::VectorXd>>& init = {});

// One Gauss-Seidel sweep: closed-form (theta, d, e), the G update through
// psd_project, nonnegativity clamps, the ellipsoid projection of theta', the
// closed-form (A, B), then all seven multiplier steps. Returns the combined
// constraint residual after the sweep.
double admm_step(DualState& state, const MomentEnvelope& env, double lambda, double rho);

// Runs admm_step to tolerance, then recovers the maximizing (C, b) from the
// multipliers of the box constraints (clamped into the box) and returns the
// ridge solution at that recovered pair.
std::pair<SaddleState, SolverReport> admm_solve(const MomentEnvelope& env, double lambda,
                                                const AdmmConfig& cfg = {});

// Objective of the dual minimization at a feasible point; upper-bounds the
// boxed PSD-constrained maximum of g.
double dual_objective(const Eigen::VectorXd& theta, const Eigen::VectorXd& d,
                      const Eigen::VectorXd& e, const Eigen::MatrixXd& A,
                      const Eigen::MatrixXd& B, const Eigen::VectorXd& b_lo,
                      const Eigen::VectorXd& b_hi, const Eigen::MatrixXd& c_lo,
                      const Eigen::MatrixXd& c_hi, double lambda);

namespace admm_detail {

// Closed-form minimizers of the two quadratic subproblems; exposed so tests
// can verify them against dense solves of the same subproblems.
void solve_theta_de_block(const Eigen::VectorXd& theta_prime, const Eigen::VectorXd& d_prime,
                          const Eigen::VectorXd& e_prime, const Eigen::VectorXd& mu_theta,
                          const Eigen::VectorXd& mu_d, const Eigen::VectorXd& mu_e,
                          const Eigen::VectorXd& eta, const Eigen::VectorXd& b_lo,
                          const Eigen::VectorXd& b_hi, double lambda, double rho,
                          Eigen::VectorXd* theta, Eigen::VectorXd* d, Eigen::VectorXd* e);

void solve_ab_block(const Eigen::MatrixXd& A_prime, const Eigen::MatrixXd& B_prime,
                    const Eigen::MatrixXd& G, const Eigen::MatrixXd& Gamma,
                    const Eigen::MatrixXd& M_A, const Eigen::MatrixXd& M_B,
                    const Eigen::MatrixXd& c_lo, const Eigen::MatrixXd& c_hi, double rho,
                    Eigen::MatrixXd* A, Eigen::MatrixXd* B);

}  // namespace admm_detail

}  // namespace drim
