// Low-order moment estimation from incomplete data: pairwise-available point
// estimates and bootstrap confidence radii, assembled into the box envelope
// consumed by every robust solver.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "masked.hpp"

namespace drim {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

struct PairMoments {
  Eigen::MatrixXd C0;   // 0 where no joint support
  CountMatrix counts;   // joint-availability counts m_ij
};

struct CrossMoments {
  Eigen::VectorXd b0;
  CountVector counts;
};

// Point estimates and bootstrap radii for second moments (C), cross moments
// with the target (b), and per-column first moments (mu). Pairs with no joint
// support are flagged; their boxes fall back to [-flag_bound, +flag_bound].
struct MomentEnvelope {
  Eigen::MatrixXd C0, Delta;
  Eigen::VectorXd b0, delta_b;
  Eigen::VectorXd mu0, mu_delta;
  double c = 2.0;
  int k = 30;
  std::uint64_t seed = 0;
  CountMatrix counts;
  CountVector counts_b, counts_mu;
  BoolArray flagged;        // d x d, true where m_ij = 0
  BoolVector flagged_b;     // true where the target pair has no joint support
  BoolVector flagged_mu;    // true where a column has no available entries
  double flag_bound = 0.0;  // max |C0| over available pairs
  bool has_target = false;
  double target_mean = 0.0;  // mean of the available target entries
  std::vector<std::string> column_names;
  std::string target_name;

  Eigen::Index dim() const { return C0.rows(); }

  // Box faces; flagged entries widen to [-flag_bound, +flag_bound].
  Eigen::MatrixXd c_min() const;
  Eigen::MatrixXd c_max() const;
  Eigen::VectorXd b_min() const;
  Eigen::VectorXd b_max() const;
  Eigen::VectorXd mu_min() const;
  Eigen::VectorXd mu_max() const;

  void validate() const;
};

// C0[i][j] = mean of X[.,i]*X[.,j] over rows where both are available.
PairMoments point_second_moment(const MaskedMatrix& m);

// Same with the second factor fixed to y.
CrossMoments point_cross_moment(const MaskedMatrix& m, const MaskedVector& y);

// Standard deviation (over k resamples of size m_ij, drawn with replacement
// from the jointly-available rows) of the second-moment product mean.
// Throws Error{unavailable} when the pair has no joint support.
double bootstrap_radius(const MaskedMatrix& m, Eigen::Index i, Eigen::Index j, int k,
                        std::uint64_t seed);
double bootstrap_cross_radius(const MaskedMatrix& m, const MaskedVector& y, Eigen::Index i,
                              int k, std::uint64_t seed);
// Single-factor version for first moments.
double bootstrap_mean_radius(const MaskedVector& col, int k, std::uint64_t seed);

// Assembles all point estimates and radii. Radii use per-pair derived seeds,
// so the optional thread pool cannot change the result. Throws
// Error{unavailable} when no feature pair is jointly observed.
MomentEnvelope build_envelope(const MaskedMatrix& m, const MaskedVector* y, int k, double c,
                              std::uint64_t seed, int threads = 1);

// JSON round-trip. config_json, when nonempty, must be a JSON object and is
// echoed verbatim under "config" for provenance.
void save_envelope(const MomentEnvelope& env, const std::string& path,
                   const std::string& config_json = "");
MomentEnvelope load_envelope(const std::string& path);

}  // namespace drim
