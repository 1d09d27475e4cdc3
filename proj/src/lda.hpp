// Robust normal discriminant analysis: class moments with box means and a
// finite set of bootstrap covariance candidates, worst-case means by sign
// rule, the simplex-regularized maximization over candidates (bisection and
// exact sort solve), Monte-Carlo loss/gradient training, and EM rounds for
// missing labels.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "masked.hpp"
#include "moments.hpp"

namespace drim {

struct MeanBox {
  Eigen::VectorXd lo, hi;
};

struct ClassMomentSet {
  MeanBox mu;
  std::vector<Eigen::MatrixXd> covariances;  // k symmetric PSD candidates
  double prior = 0.0;
};

struct ClassMoments {
  ClassMomentSet class0, class1;
};

struct LdaModel {
  Eigen::VectorXd w;
  double threshold = 0.5;
  std::vector<std::string> feature_names;
  std::string label_name;
};

struct SimplexWeights {
  Eigen::VectorXd p;
  double lambda_lag = 0.0;
};

enum class ClassLabel { zero = 0, one = 1 };

// Loss-maximizing mean for class 1: the box face that minimizes w'mu, i.e.
// hi where w[i] <= 0 and lo elsewhere.
Eigen::VectorXd worst_case_mean(const Eigen::VectorXd& w, const Eigen::VectorXd& mu_lo,
                                const Eigen::VectorXd& mu_hi);
// Mirrored rule for class 0 (its loss grows with w'mu): lo where w[i] <= 0.
Eigen::VectorXd worst_case_mean_class0(const Eigen::VectorXd& w, const Eigen::VectorXd& mu_lo,
                                       const Eigen::VectorXd& mu_hi);

// k covariance candidates from pairwise-available estimates: element 0 is the
// PSD-projected plug-in, elements 1..k-1 are bootstrap resamples keyed by
// (seed, t, i, j), so sets for increasing k are nested.
std::vector<Eigen::MatrixXd> bootstrap_cov_set(const MaskedMatrix& class_data, int k,
                                               std::uint64_t seed);

// Column means of the class data with bootstrap radii scaled by c.
MeanBox bootstrap_mean_box(const MaskedMatrix& class_data, int k, double c, std::uint64_t seed);

// argmax_p sum p_i f_i - delta |p|^2 over the probability simplex, via
// bisection on the Lagrange multiplier of the sum constraint (p_i has the
// closed form [(f_i - lambda) / (2 delta)]_+).
SimplexWeights simplex_bisection(const Eigen::VectorXd& f, double delta, double eps = 1e-8);

// Exact active-set solution of the same problem by sorting.
SimplexWeights simplex_sort_solve(const Eigen::VectorXd& f, double delta);

// prior * mean over n_mc draws from N(mu, Sigma) of the logistic loss of the
// given class. Draws depend only on (seed, n_mc, dimension): candidates
// evaluated with one seed share common random numbers.
double class_loss_mc(const Eigen::VectorXd& w, const Eigen::VectorXd& mu,
                     const Eigen::MatrixXd& sigma, double prior, int n_mc, std::uint64_t seed,
                     ClassLabel label);
// Same draws; also returns the analytic gradient of the Monte-Carlo loss.
double class_loss_grad_mc(const Eigen::VectorXd& w, const Eigen::VectorXd& mu,
                          const Eigen::MatrixXd& sigma, double prior, int n_mc,
                          std::uint64_t seed, ClassLabel label, Eigen::VectorXd* grad);

// Priors, mean boxes, and covariance candidate sets for both classes.
// Labels must be 0/1 and both classes nonempty.
ClassMoments estimate_class_moments(const MaskedMatrix& m, const std::vector<int>& labels,
                                    int k, double mu_c, std::uint64_t seed);

struct RndaOptions {
  int k = 5;
  int iters = 100;
  double alpha = 0.05;
  int n_mc = 512;
  double delta_scale = 0.1;  // delta = delta_scale * max loss, per iteration
  double mu_c = 2.0;         // mean-box radius multiplier
  double bisect_eps = 1e-8;
  std::uint64_t seed = 0;
};

struct RndaReport {
  std::vector<double> loss_trace;  // robust objective estimate per iteration
  std::int64_t grad_calls = 0;     // class_loss_grad_mc invocations
};

LdaModel rnda_train(const MaskedMatrix& m, const std::vector<int>& labels,
                    const RndaOptions& opts, RndaReport* report = nullptr);

// Per-class means, pairwise-available second moments, and priors from the
// labeled rows; zero-count entries are left at 0 as in the moments module.
struct GaussianClassParams {
  Eigen::VectorXd mu0, mu1;
  Eigen::MatrixXd second0, second1;
  double pi0 = 0.0, pi1 = 0.0;
  CountMatrix counts0, counts1;
};

GaussianClassParams em_m_step(const MaskedMatrix& m, const std::vector<int>& labels);

// Hard assignment by comparing class log densities on each row's available
// coordinates (marginal Gaussian, covariance = second moment minus mu mu').
// Ties go to class 0.
std::vector<int> em_e_step(const MaskedMatrix& m, const GaussianClassParams& params);

// Labels may contain -1 for missing. With no missing labels this is exactly
// rnda_train. Otherwise missing labels start random and are reassigned from
// the trained w after each of em_rounds inner solves; if a class empties the
// run restarts with fresh random labels a bounded number of times.
LdaModel em_rnda_train(const MaskedMatrix& m, const std::vector<int>& labels, int em_rounds,
                       const RndaOptions& opts, RndaReport* report = nullptr);

// 1 iff sigma(w'x) >= 0.5 over the available coordinates (missing ones
// contribute zero to the inner product).
int classify(const LdaModel& model, const Eigen::VectorXd& x, const BoolVector& avail);
std::vector<int> classify_batch(const LdaModel& model, const MaskedMatrix& m);

void save_lda_model(const LdaModel& model, const std::string& path,
                    const std::string& config_json = "");
LdaModel load_lda_model(const std::string& path);

}  // namespace drim
