#include "lda.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <numbers>
#include <numeric>

#include "admm.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace drim {

namespace {

using json = nlohmann::json;

constexpr std::uint64_t kCovTag = 21;
constexpr std::uint64_t kMeanBoxTag = 22;
constexpr std::uint64_t kMcTag = 23;
constexpr std::uint64_t kEmTag = 24;

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t idx = 0) {
  return rng::mix(seed ^ rng::mix(tag ^ rng::mix(idx)));
}

MaskedMatrix rows_subset(const MaskedMatrix& m, const std::vector<Eigen::Index>& rows) {
  MaskedMatrix out;
  out.column_names = m.column_names;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), m.cols());
  out.mask.resize(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.values.row(static_cast<Eigen::Index>(r)) = m.values.row(rows[r]);
    out.mask.row(static_cast<Eigen::Index>(r)) = m.mask.row(rows[r]);
  }
  return out;
}

// Square root factor L with L L' = Sigma, from the eigendecomposition with
// negative eigenvalues clamped; exact for Sigma = 0 where Cholesky is not.
Eigen::MatrixXd sqrt_factor(const Eigen::MatrixXd& sigma) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig((sigma + sigma.transpose()) / 2.0);
  if (eig.info() != Eigen::Success) fail(ErrorCode::numeric, "covariance eigensolver failed");
  if (eig.eigenvalues().minCoeff() < -1e-8 * std::max(1.0, std::abs(eig.eigenvalues().maxCoeff())))
    fail(ErrorCode::numeric, "covariance candidate is not positive semidefinite");
  const Eigen::VectorXd s = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * s.asDiagonal();
}

// Standard-normal draw matrix keyed by seed alone, shared by loss and
// gradient evaluations of every candidate at one iteration.
Eigen::MatrixXd normal_draws(int n_mc, Eigen::Index d, std::uint64_t seed) {
  rng::Stream stream = rng::Stream(seed).derive(kMcTag);
  Eigen::MatrixXd z(n_mc, d);
  for (int s = 0; s < n_mc; ++s)
    for (Eigen::Index j = 0; j < d; ++j) z(s, j) = stream.next_normal();
  return z;
}

double loss_grad_impl(const Eigen::VectorXd& w, const Eigen::VectorXd& mu,
                      const Eigen::MatrixXd& sigma, double prior, int n_mc, std::uint64_t seed,
                      ClassLabel label, Eigen::VectorXd* grad) {
  if (w.size() != mu.size() || sigma.rows() != w.size() || sigma.cols() != w.size())
    fail(ErrorCode::invalid_argument, "class loss: shape mismatch");
  if (n_mc < 1) fail(ErrorCode::invalid_argument, "class loss: n_mc must be >= 1");
  const Eigen::Index d = w.size();
  const Eigen::MatrixXd L = sqrt_factor(sigma);
  const Eigen::MatrixXd z = normal_draws(n_mc, d, seed);

  double loss = 0.0;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
  for (int s = 0; s < n_mc; ++s) {
    const Eigen::VectorXd x = mu + L * z.row(s).transpose();
    const double t = w.dot(x);
    if (label == ClassLabel::one) {
      loss += softplus(-t);                    // -log sigmoid(t)
      g -= (1.0 - sigmoid(t)) * x;
    } else {
      loss += softplus(t);                     // -log (1 - sigmoid(t))
      g += sigmoid(t) * x;
    }
  }
  loss = prior * loss / static_cast<double>(n_mc);
  if (grad) *grad = prior * g / static_cast<double>(n_mc);
  return loss;
}

void require_binary_labels(const std::vector<int>& labels, Eigen::Index rows) {
  if (static_cast<Eigen::Index>(labels.size()) != rows)
    fail(ErrorCode::invalid_argument, "labels: length does not match row count");
  for (int v : labels)
    if (v != 0 && v != 1) fail(ErrorCode::invalid_argument, "labels: values must be 0 or 1");
}

std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> split_classes(
    const std::vector<int>& labels) {
  std::vector<Eigen::Index> s0, s1;
  for (std::size_t i = 0; i < labels.size(); ++i)
    (labels[i] == 1 ? s1 : s0).push_back(static_cast<Eigen::Index>(i));
  return {std::move(s0), std::move(s1)};
}

// Marginal Gaussian log density on the available coordinates, with the
// covariance PSD-projected and jittered until it factors.
double marginal_log_density(const Eigen::VectorXd& x_av, const Eigen::VectorXd& mu_av,
                            const Eigen::MatrixXd& sigma_av) {
  const Eigen::Index n = x_av.size();
  Eigen::MatrixXd s = psd_project(sigma_av);
  const double scale = std::max(1.0, s.diagonal().maxCoeff());
  double jitter = 1e-9 * scale;
  for (int attempt = 0; attempt < 14; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() == Eigen::Success) {
      const Eigen::VectorXd r = x_av - mu_av;
      const Eigen::VectorXd half = llt.matrixL().solve(r);
      double logdet = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        logdet += 2.0 * std::log(llt.matrixL()(i, i));
      return -0.5 * (half.squaredNorm() + logdet +
                     static_cast<double>(n) * std::log(2.0 * std::numbers::pi));
    }
    s.diagonal().array() += jitter;
    jitter *= 10.0;
  }
  fail(ErrorCode::numeric, "class covariance not invertible after jitter");
}

}  // namespace

Eigen::VectorXd worst_case_mean(const Eigen::VectorXd& w, const Eigen::VectorXd& mu_lo,
                                const Eigen::VectorXd& mu_hi) {
  if (w.size() != mu_lo.size() || w.size() != mu_hi.size())
    fail(ErrorCode::invalid_argument, "worst_case_mean: shape mismatch");
  Eigen::VectorXd mu(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) mu(i) = w(i) <= 0.0 ? mu_hi(i) : mu_lo(i);
  return mu;
}

Eigen::VectorXd worst_case_mean_class0(const Eigen::VectorXd& w, const Eigen::VectorXd& mu_lo,
                                       const Eigen::VectorXd& mu_hi) {
  if (w.size() != mu_lo.size() || w.size() != mu_hi.size())
    fail(ErrorCode::invalid_argument, "worst_case_mean: shape mismatch");
  Eigen::VectorXd mu(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) mu(i) = w(i) <= 0.0 ? mu_lo(i) : mu_hi(i);
  return mu;
}

std::vector<Eigen::MatrixXd> bootstrap_cov_set(const MaskedMatrix& class_data, int k,
                                               std::uint64_t seed) {
  if (k < 1) fail(ErrorCode::invalid_argument, "bootstrap_cov_set: k must be >= 1");
  const Eigen::Index d = class_data.cols();
  const rng::Stream base(sub_seed(seed, kCovTag));

  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(k));

  // Plug-in: pairwise second moments centered with columnwise means.
  const PairMoments pm = point_second_moment(class_data);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double acc = 0.0;
    std::int64_t cnt = 0;
    for (Eigen::Index r = 0; r < class_data.rows(); ++r)
      if (class_data.mask(r, j)) {
        acc += class_data.values(r, j);
        ++cnt;
      }
    mu(j) = cnt > 0 ? acc / static_cast<double>(cnt) : 0.0;
  }
  out.push_back(psd_project(pm.C0 - mu * mu.transpose()));

  for (int t = 1; t < k; ++t) {
    Eigen::MatrixXd s(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = i; j < d; ++j) {
        std::vector<Eigen::Index> rows;
        for (Eigen::Index r = 0; r < class_data.rows(); ++r)
          if (class_data.mask(r, i) && class_data.mask(r, j)) rows.push_back(r);
        double cov = 0.0;
        if (!rows.empty()) {
          rng::Stream stream = base.derive(static_cast<std::uint64_t>(t),
                                           static_cast<std::uint64_t>(i),
                                           static_cast<std::uint64_t>(j));
          const std::size_t m = rows.size();
          double mean_i = 0.0, mean_j = 0.0, mean_ij = 0.0;
          for (std::size_t r = 0; r < m; ++r) {
            const Eigen::Index row = rows[stream.next_below(m)];
            mean_i += class_data.values(row, i);
            mean_j += class_data.values(row, j);
            mean_ij += class_data.values(row, i) * class_data.values(row, j);
          }
          mean_i /= static_cast<double>(m);
          mean_j /= static_cast<double>(m);
          mean_ij /= static_cast<double>(m);
          cov = mean_ij - mean_i * mean_j;
        }
        s(i, j) = s(j, i) = cov;
      }
    out.push_back(psd_project(s));
  }
  return out;
}

MeanBox bootstrap_mean_box(const MaskedMatrix& class_data, int k, double c, std::uint64_t seed) {
  const Eigen::Index d = class_data.cols();
  Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd radius = Eigen::VectorXd::Zero(d);
  BoolVector flagged = BoolVector::Constant(d, false);
  for (Eigen::Index j = 0; j < d; ++j) {
    const MaskedVector col = column_of(class_data, j);
    if (col.available_count() == 0) {
      flagged(j) = true;
      continue;
    }
    double acc = 0.0;
    std::int64_t cnt = 0;
    for (Eigen::Index r = 0; r < col.size(); ++r)
      if (col.mask(r)) {
        acc += col.values(r);
        ++cnt;
      }
    mu0(j) = acc / static_cast<double>(cnt);
    radius(j) = bootstrap_mean_radius(col, k, sub_seed(seed, kMeanBoxTag, static_cast<std::uint64_t>(j)));
  }
  double bound = 0.0;
  for (Eigen::Index j = 0; j < d; ++j)
    if (!flagged(j)) bound = std::max(bound, std::abs(mu0(j)));
  MeanBox box;
  box.lo = mu0 - c * radius;
  box.hi = mu0 + c * radius;
  for (Eigen::Index j = 0; j < d; ++j)
    if (flagged(j)) {
      box.lo(j) = -bound;
      box.hi(j) = bound;
    }
  return box;
}

SimplexWeights simplex_bisection(const Eigen::VectorXd& f, double delta, double eps) {
  if (f.size() < 1) fail(ErrorCode::invalid_argument, "simplex: empty loss vector");
  if (!(delta > 0.0)) fail(ErrorCode::invalid_argument, "simplex: delta must be positive");
  const auto weights = [&](double lam) {
    return Eigen::VectorXd(((f.array() - lam) / (2.0 * delta)).max(0.0));
  };
  double hi = f.maxCoeff();  // sum is 0 here
  double lo = 0.0;
  if (weights(lo).sum() < 1.0) {
    lo = -std::max({1.0, 2.0 * delta, std::abs(f.maxCoeff())});
    while (weights(lo).sum() < 1.0) lo *= 2.0;
  }
  double mid = (lo + hi) / 2.0;
  for (int it = 0; it < 64; ++it) {
    mid = (lo + hi) / 2.0;
    const double s = weights(mid).sum();
    if (std::abs(s - 1.0) <= eps) break;
    if (s < 1.0)
      hi = mid;
    else
      lo = mid;
  }
  return SimplexWeights{weights(mid), mid};
}

SimplexWeights simplex_sort_solve(const Eigen::VectorXd& f, double delta) {
  if (f.size() < 1) fail(ErrorCode::invalid_argument, "simplex: empty loss vector");
  if (!(delta > 0.0)) fail(ErrorCode::invalid_argument, "simplex: delta must be positive");
  // p = [(f - lambda)/(2 delta)]_+ summing to 1 is the simplex projection of
  // f/(2 delta); the active set falls out of one descending sort.
  const Eigen::Index k = f.size();
  std::vector<double> v(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) v[static_cast<std::size_t>(i)] = f(i) / (2.0 * delta);
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    cumulative += sorted[static_cast<std::size_t>(j)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (j + 1 == k || sorted[static_cast<std::size_t>(j + 1)] <= candidate) {
      tau = candidate;
      break;
    }
  }
  Eigen::VectorXd p(k);
  for (Eigen::Index i = 0; i < k; ++i)
    p(i) = std::max(v[static_cast<std::size_t>(i)] - tau, 0.0);
  return SimplexWeights{std::move(p), 2.0 * delta * tau};
}

double class_loss_mc(const Eigen::VectorXd& w, const Eigen::VectorXd& mu,
                     const Eigen::MatrixXd& sigma, double prior, int n_mc, std::uint64_t seed,
                     ClassLabel label) {
  return loss_grad_impl(w, mu, sigma, prior, n_mc, seed, label, nullptr);
}

double class_loss_grad_mc(const Eigen::VectorXd& w, const Eigen::VectorXd& mu,
                          const Eigen::MatrixXd& sigma, double prior, int n_mc,
                          std::uint64_t seed, ClassLabel label, Eigen::VectorXd* grad) {
  return loss_grad_impl(w, mu, sigma, prior, n_mc, seed, label, grad);
}

ClassMoments estimate_class_moments(const MaskedMatrix& m, const std::vector<int>& labels,
                                    int k, double mu_c, std::uint64_t seed) {
  require_binary_labels(labels, m.rows());
  const auto [s0, s1] = split_classes(labels);
  if (s0.empty() || s1.empty())
    fail(ErrorCode::unavailable, "class moments: both classes must be nonempty");
  const MaskedMatrix m0 = rows_subset(m, s0);
  const MaskedMatrix m1 = rows_subset(m, s1);

  ClassMoments out;
  out.class1.prior = static_cast<double>(s1.size()) / static_cast<double>(labels.size());
  out.class0.prior = 1.0 - out.class1.prior;
  out.class1.covariances = bootstrap_cov_set(m1, k, sub_seed(seed, 1));
  out.class0.covariances = bootstrap_cov_set(m0, k, sub_seed(seed, 0));
  out.class1.mu = bootstrap_mean_box(m1, std::max(k, 2), mu_c, sub_seed(seed, 11));
  out.class0.mu = bootstrap_mean_box(m0, std::max(k, 2), mu_c, sub_seed(seed, 10));
  return out;
}

LdaModel rnda_train(const MaskedMatrix& m, const std::vector<int>& labels,
                    const RndaOptions& opts, RndaReport* report) {
  if (opts.k < 1 || opts.iters < 1 || opts.n_mc < 1)
    fail(ErrorCode::invalid_argument, "rnda_train: k, iters, n_mc must be >= 1");
  const Eigen::Index d = m.cols();
  const ClassMoments cm = estimate_class_moments(m, labels, opts.k, opts.mu_c, opts.seed);

  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  RndaReport local;
  RndaReport& rep = report ? *report : local;
  rep.loss_trace.clear();
  rep.grad_calls = 0;

  std::vector<double> f(static_cast<std::size_t>(opts.k)), g(static_cast<std::size_t>(opts.k));
  std::vector<Eigen::VectorXd> grad_f(static_cast<std::size_t>(opts.k)),
      grad_g(static_cast<std::size_t>(opts.k));

  for (int t = 0; t < opts.iters; ++t) {
    const Eigen::VectorXd mu1 = worst_case_mean(w, cm.class1.mu.lo, cm.class1.mu.hi);
    const Eigen::VectorXd mu0 = worst_case_mean_class0(w, cm.class0.mu.lo, cm.class0.mu.hi);
    const std::uint64_t iter_seed = sub_seed(opts.seed, kMcTag, 3000 + static_cast<std::uint64_t>(t));

    for (int i = 0; i < opts.k; ++i) {
      f[static_cast<std::size_t>(i)] = class_loss_grad_mc(
          w, mu1, cm.class1.covariances[static_cast<std::size_t>(i)], cm.class1.prior,
          opts.n_mc, sub_seed(iter_seed, 1), ClassLabel::one,
          &grad_f[static_cast<std::size_t>(i)]);
      ++rep.grad_calls;
    }
    for (int j = 0; j < opts.k; ++j) {
      g[static_cast<std::size_t>(j)] = class_loss_grad_mc(
          w, mu0, cm.class0.covariances[static_cast<std::size_t>(j)], cm.class0.prior,
          opts.n_mc, sub_seed(iter_seed, 0), ClassLabel::zero,
          &grad_g[static_cast<std::size_t>(j)]);
      ++rep.grad_calls;
    }

    const double f_max = *std::max_element(f.begin(), f.end());
    const double g_max = *std::max_element(g.begin(), g.end());
    const double delta_f = opts.delta_scale * std::max(f_max, 1e-12);
    const double delta_g = opts.delta_scale * std::max(g_max, 1e-12);
    const Eigen::VectorXd fv = Eigen::Map<const Eigen::VectorXd>(f.data(), opts.k);
    const Eigen::VectorXd gv = Eigen::Map<const Eigen::VectorXd>(g.data(), opts.k);
    const SimplexWeights p = simplex_bisection(fv, delta_f, opts.bisect_eps);
    const SimplexWeights q = simplex_bisection(gv, delta_g, opts.bisect_eps);
    rep.loss_trace.push_back(f_max + g_max);

    Eigen::VectorXd step = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < opts.k; ++i) step += p.p(i) * grad_f[static_cast<std::size_t>(i)];
    for (int j = 0; j < opts.k; ++j) step += q.p(j) * grad_g[static_cast<std::size_t>(j)];
    w -= opts.alpha * step;
    if (!w.allFinite())
      fail(ErrorCode::diverged, "rnda_train: non-finite weights at iteration " + std::to_string(t + 1));
  }

  LdaModel model;
  model.w = std::move(w);
  model.feature_names = m.column_names;
  return model;
}

GaussianClassParams em_m_step(const MaskedMatrix& m, const std::vector<int>& labels) {
  require_binary_labels(labels, m.rows());
  const auto [s0, s1] = split_classes(labels);
  if (s0.empty() || s1.empty())
    fail(ErrorCode::unavailable, "em_m_step: both classes must be nonempty");
  const MaskedMatrix m0 = rows_subset(m, s0);
  const MaskedMatrix m1 = rows_subset(m, s1);

  GaussianClassParams params;
  const PairMoments pm0 = point_second_moment(m0);
  const PairMoments pm1 = point_second_moment(m1);
  params.second0 = pm0.C0;
  params.second1 = pm1.C0;
  params.counts0 = pm0.counts;
  params.counts1 = pm1.counts;
  params.pi1 = static_cast<double>(s1.size()) / static_cast<double>(labels.size());
  params.pi0 = 1.0 - params.pi1;

  const auto column_means = [](const MaskedMatrix& part) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(part.cols());
    for (Eigen::Index j = 0; j < part.cols(); ++j) {
      double acc = 0.0;
      std::int64_t cnt = 0;
      for (Eigen::Index r = 0; r < part.rows(); ++r)
        if (part.mask(r, j)) {
          acc += part.values(r, j);
          ++cnt;
        }
      mu(j) = cnt > 0 ? acc / static_cast<double>(cnt) : 0.0;
    }
    return mu;
  };
  params.mu0 = column_means(m0);
  params.mu1 = column_means(m1);
  return params;
}

std::vector<int> em_e_step(const MaskedMatrix& m, const GaussianClassParams& params) {
  const Eigen::MatrixXd sigma0 = params.second0 - params.mu0 * params.mu0.transpose();
  const Eigen::MatrixXd sigma1 = params.second1 - params.mu1 * params.mu1.transpose();
  std::vector<int> labels(static_cast<std::size_t>(m.rows()), 0);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<Eigen::Index> av;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m.mask(r, j)) av.push_back(j);
    double log0 = params.pi0 > 0 ? std::log(params.pi0) : -std::numeric_limits<double>::infinity();
    double log1 = params.pi1 > 0 ? std::log(params.pi1) : -std::numeric_limits<double>::infinity();
    if (!av.empty()) {
      const auto n = static_cast<Eigen::Index>(av.size());
      Eigen::VectorXd x(n), mu0(n), mu1(n);
      Eigen::MatrixXd s0(n, n), s1(n, n);
      for (Eigen::Index a = 0; a < n; ++a) {
        x(a) = m.values(r, av[static_cast<std::size_t>(a)]);
        mu0(a) = params.mu0(av[static_cast<std::size_t>(a)]);
        mu1(a) = params.mu1(av[static_cast<std::size_t>(a)]);
        for (Eigen::Index b = 0; b < n; ++b) {
          s0(a, b) = sigma0(av[static_cast<std::size_t>(a)], av[static_cast<std::size_t>(b)]);
          s1(a, b) = sigma1(av[static_cast<std::size_t>(a)], av[static_cast<std::size_t>(b)]);
        }
      }
      log0 += marginal_log_density(x, mu0, (s0 + s0.transpose()) / 2.0);
      log1 += marginal_log_density(x, mu1, (s1 + s1.transpose()) / 2.0);
    }
    labels[static_cast<std::size_t>(r)] = log1 > log0 ? 1 : 0;
  }
  return labels;
}

LdaModel em_rnda_train(const MaskedMatrix& m, const std::vector<int>& labels, int em_rounds,
                       const RndaOptions& opts, RndaReport* report) {
  if (static_cast<Eigen::Index>(labels.size()) != m.rows())
    fail(ErrorCode::invalid_argument, "labels: length does not match row count");
  bool any_missing = false;
  for (int v : labels) {
    if (v == -1)
      any_missing = true;
    else if (v != 0 && v != 1)
      fail(ErrorCode::invalid_argument, "labels: values must be 0, 1, or -1 for missing");
  }
  if (!any_missing) return rnda_train(m, labels, opts, report);
  if (em_rounds < 1) fail(ErrorCode::invalid_argument, "em_rnda_train: em_rounds must be >= 1");

  constexpr int kMaxRestarts = 5;
  for (int attempt = 0; attempt < kMaxRestarts; ++attempt) {
    rng::Stream init_stream =
        rng::Stream(opts.seed).derive(kEmTag, static_cast<std::uint64_t>(attempt));
    std::vector<int> cur = labels;
    for (auto& v : cur)
      if (v == -1) v = init_stream.next_double() < 0.5 ? 0 : 1;

    bool emptied = false;
    LdaModel model;
    for (int round = 0; round < em_rounds; ++round) {
      const auto [s0, s1] = split_classes(cur);
      if (s0.empty() || s1.empty()) {
        emptied = true;
        break;
      }
      RndaOptions inner = opts;
      inner.seed = sub_seed(opts.seed, kEmTag, 6000 + static_cast<std::uint64_t>(round));
      model = rnda_train(m, cur, inner, report);
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == -1)
          cur[i] = classify(model, m.values.row(static_cast<Eigen::Index>(i)).transpose(),
                            m.mask.row(static_cast<Eigen::Index>(i)).transpose());
    }
    if (!emptied) return model;
  }
  fail(ErrorCode::unavailable, "em_rnda_train: a class emptied out in every restart");
}

int classify(const LdaModel& model, const Eigen::VectorXd& x, const BoolVector& avail) {
  if (x.size() != model.w.size() || avail.size() != x.size())
    fail(ErrorCode::invalid_argument, "classify: dimension mismatch");
  double t = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (avail(i)) t += model.w(i) * x(i);
  return sigmoid(t) >= model.threshold ? 1 : 0;
}

std::vector<int> classify_batch(const LdaModel& model, const MaskedMatrix& m) {
  std::vector<int> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    out[static_cast<std::size_t>(r)] =
        classify(model, m.values.row(r).transpose(), m.mask.row(r).transpose());
  return out;
}

void save_lda_model(const LdaModel& model, const std::string& path,
                    const std::string& config_json) {
  json doc;
  doc["type"] = "lda_model";
  doc["version"] = 1;
  doc["threshold"] = model.threshold;
  doc["features"] = model.feature_names;
  doc["label"] = model.label_name;
  json w = json::array();
  for (Eigen::Index i = 0; i < model.w.size(); ++i) w.push_back(model.w(i));
  doc["w"] = std::move(w);
  if (!config_json.empty()) {
    try {
      doc["config"] = json::parse(config_json);
    } catch (const json::exception& e) {
      fail(ErrorCode::invalid_argument, std::string("config echo is not valid JSON: ") + e.what());
    }
  }
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  out << doc.dump(2) << '\n';
  if (!out) fail(ErrorCode::io, "write failed for " + path);
}

LdaModel load_lda_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, path + ": " + e.what());
  }
  try {
    if (doc.at("type").get<std::string>() != "lda_model")
      fail(ErrorCode::parse, path + ": not a classifier model document");
    LdaModel model;
    model.threshold = doc.at("threshold").get<double>();
    model.feature_names = doc.at("features").get<std::vector<std::string>>();
    model.label_name = doc.at("label").get<std::string>();
    const auto& w = doc.at("w");
    model.w.resize(static_cast<Eigen::Index>(w.size()));
    for (Eigen::Index i = 0; i < model.w.size(); ++i)
      model.w(i) = w.at(static_cast<std::size_t>(i)).get<double>();
    return model;
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, path + ": " + e.what());
  }
}

}  // namespace drim
