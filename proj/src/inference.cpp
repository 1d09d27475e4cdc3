#include "inference.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <map>

#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace drim {

namespace {

using json = nlohmann::json;

std::vector<Eigen::Index> available_indices(const BoolVector& avail) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < avail.size(); ++i)
    if (avail(i)) idx.push_back(i);
  return idx;
}

// Ridge solution of the saved moments restricted to a coordinate subset.
Eigen::VectorXd restricted_solve(const RegressionModel& model,
                                 const std::vector<Eigen::Index>& idx) {
  const auto s = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd c_sub(s, s);
  Eigen::VectorXd b_sub(s);
  for (Eigen::Index a = 0; a < s; ++a) {
    b_sub(a) = model.b(idx[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = 0; b < s; ++b)
      c_sub(a, b) = model.C(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  }
  return ridge_solve(c_sub, b_sub, model.lambda);
}

}  // namespace

SolverKind solver_from_name(const std::string& name) {
  if (name == "pga") return SolverKind::pga;
  if (name == "nesterov") return SolverKind::nesterov;
  if (name == "admm") return SolverKind::admm;
  fail(ErrorCode::invalid_argument, "unknown solver '" + name + "' (pga, nesterov, admm)");
}

std::string solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::pga: return "pga";
    case SolverKind::nesterov: return "nesterov";
    case SolverKind::admm: return "admm";
  }
  fail(ErrorCode::internal, "unreachable solver kind");
}

void RegressionModel::validate() const {
  const Eigen::Index d = theta.size();
  if (C.rows() != d || C.cols() != d || b.size() != d)
    fail(ErrorCode::invalid_argument, "regression model: shape mismatch");
  if (!(lambda > 0.0)) fail(ErrorCode::invalid_argument, "regression model: lambda must be positive");
  if (static_cast<Eigen::Index>(feature_names.size()) != d)
    fail(ErrorCode::invalid_argument, "regression model: feature name count mismatch");
  Eigen::MatrixXd A = C;
  A.diagonal().array() += lambda;
  const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
  if ((A * theta - b).lpNorm<Eigen::Infinity>() > 1e-8 * scale)
    fail(ErrorCode::invalid_argument, "regression model: theta is not the ridge solution of (C, b)");
}

std::pair<RegressionModel, SolverReport> train_regression_from_envelope(
    const MomentEnvelope& env, const TrainOptions& opts) {
  std::pair<SaddleState, SolverReport> solved = [&] {
    switch (opts.solver) {
      case SolverKind::pga:
      case SolverKind::nesterov: {
        AscentOptions ao;
        if (opts.max_iters > 0) ao.max_iters = opts.max_iters;
        if (opts.tol > 0) ao.tol = opts.tol;
        return opts.solver == SolverKind::pga ? pga_solve(env, opts.lambda, ao)
                                              : nesterov_solve(env, opts.lambda, ao);
      }
      case SolverKind::admm: {
        AdmmConfig cfg;
        cfg.rho = opts.rho;
        if (opts.max_iters > 0) cfg.max_iters = opts.max_iters;
        if (opts.tol > 0) cfg.tol = opts.tol;
        return admm_solve(env, opts.lambda, cfg);
      }
    }
    fail(ErrorCode::internal, "unreachable solver kind");
  }();

  RegressionModel model;
  model.theta = std::move(solved.first.theta);
  model.C = std::move(solved.first.C);
  model.b = std::move(solved.first.b);
  model.lambda = opts.lambda;
  model.mu_y = env.target_mean;
  model.feature_names = env.column_names;
  model.target_name = env.target_name;
  model.validate();
  return {std::move(model), std::move(solved.second)};
}

std::pair<RegressionModel, SolverReport> train_regression(const MaskedMatrix& X,
                                                          const MaskedVector& y,
                                                          const TrainOptions& opts) {
  MomentEnvelope env = build_envelope(X, &y, opts.k, opts.c, opts.seed, opts.threads);
  return train_regression_from_envelope(env, opts);
}

double predict(const RegressionModel& model, const Eigen::VectorXd& x, const BoolVector& avail) {
  if (x.size() != model.theta.size() || avail.size() != x.size())
    fail(ErrorCode::invalid_argument, "predict: dimension mismatch");
  if (avail.all()) return model.theta.dot(x);
  const auto idx = available_indices(avail);
  if (idx.empty()) return model.mu_y;
  const Eigen::VectorXd theta_sub = restricted_solve(model, idx);
  double acc = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    acc += theta_sub(static_cast<Eigen::Index>(a)) * x(idx[a]);
  return acc;
}

Eigen::VectorXd predict_batch(const RegressionModel& model, const MaskedMatrix& m,
                              int* solve_count) {
  if (m.cols() != model.theta.size())
    fail(ErrorCode::invalid_argument, "predict: dimension mismatch");
  Eigen::VectorXd out(m.rows());
  int solves = 0;
  for (const auto& [pattern, rows] : pattern_groups(m)) {
    BoolVector avail(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) avail(j) = pattern[static_cast<std::size_t>(j)];
    if (avail.all()) {
      for (const Eigen::Index r : rows) out(r) = model.theta.dot(m.values.row(r));
      continue;
    }
    const auto idx = available_indices(avail);
    if (idx.empty()) {
      for (const Eigen::Index r : rows) out(r) = model.mu_y;
      continue;
    }
    const Eigen::VectorXd theta_sub = restricted_solve(model, idx);
    ++solves;
    for (const Eigen::Index r : rows) {
      double acc = 0.0;
      for (std::size_t a = 0; a < idx.size(); ++a)
        acc += theta_sub(static_cast<Eigen::Index>(a)) * m.values(r, idx[a]);
      out(r) = acc;
    }
  }
  if (solve_count) *solve_count = solves;
  return out;
}

MaskedMatrix impute(const MaskedMatrix& m, const ImputeOptions& opts) {
  const Eigen::Index d = m.cols();
  for (Eigen::Index j = 0; j < d; ++j)
    if (!m.mask.col(j).any())
      fail(ErrorCode::unavailable, "impute: column '" +
                                       m.column_names[static_cast<std::size_t>(j)] +
                                       "' has no available entries");

  MaskedMatrix out = m;
  out.mask.setConstant(true);
  parallel_for(static_cast<std::size_t>(d), opts.threads, [&](std::size_t jz) {
    const auto j = static_cast<Eigen::Index>(jz);
    if (m.mask.col(j).all()) return;

    TrainOptions topts;
    topts.solver = opts.solver;
    topts.lambda = opts.lambda;
    topts.c = opts.c;
    topts.k = opts.k;
    topts.rho = opts.rho;
    // Column-keyed seed so the imputation of each column is independent of
    // the others and of processing order.
    topts.seed = rng::mix(opts.seed ^ rng::mix(static_cast<std::uint64_t>(j) + 1));
    topts.threads = 1;

    const MaskedMatrix features = m.drop_column(j);
    const MaskedVector target = column_of(m, j);
    auto [model, report] = train_regression(features, target, topts);

    // One restricted solve per distinct pattern among the rows to fill.
    std::map<std::vector<bool>, Eigen::VectorXd> cache;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (m.mask(r, j)) continue;
      std::vector<bool> pattern(static_cast<std::size_t>(features.cols()));
      for (Eigen::Index f = 0; f < features.cols(); ++f)
        pattern[static_cast<std::size_t>(f)] = features.mask(r, f);
      const auto idx = available_indices(features.mask.row(r).transpose());
      if (idx.empty()) {
        out.values(r, j) = model.mu_y;
        continue;
      }
      auto it = cache.find(pattern);
      if (it == cache.end()) it = cache.emplace(pattern, restricted_solve(model, idx)).first;
      double acc = 0.0;
      for (std::size_t a = 0; a < idx.size(); ++a)
        acc += it->second(static_cast<Eigen::Index>(a)) * features.values(r, idx[a]);
      out.values(r, j) = acc;
    }
  });
  return out;
}

void save_regression_model(const RegressionModel& model, const std::string& path,
                           const std::string& config_json) {
  model.validate();
  json doc;
  doc["type"] = "regression_model";
  doc["version"] = 1;
  doc["lambda"] = model.lambda;
  doc["mu_y"] = model.mu_y;
  doc["features"] = model.feature_names;
  doc["target"] = model.target_name;
  json theta = json::array(), b = json::array(), c_rows = json::array();
  for (Eigen::Index i = 0; i < model.theta.size(); ++i) theta.push_back(model.theta(i));
  for (Eigen::Index i = 0; i < model.b.size(); ++i) b.push_back(model.b(i));
  for (Eigen::Index i = 0; i < model.C.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < model.C.cols(); ++j) row.push_back(model.C(i, j));
    c_rows.push_back(std::move(row));
  }
  doc["theta"] = std::move(theta);
  doc["b"] = std::move(b);
  doc["C"] = std::move(c_rows);
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

RegressionModel load_regression_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, path + ": " + e.what());
  }
  try {
    if (doc.at("type").get<std::string>() != "regression_model")
      fail(ErrorCode::parse, path + ": not a regression model document");
    RegressionModel model;
    model.lambda = doc.at("lambda").get<double>();
    model.mu_y = doc.at("mu_y").get<double>();
    model.feature_names = doc.at("features").get<std::vector<std::string>>();
    model.target_name = doc.at("target").get<std::string>();
    const auto& theta = doc.at("theta");
    const auto d = static_cast<Eigen::Index>(theta.size());
    model.theta.resize(d);
    model.b.resize(d);
    model.C.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      model.theta(i) = theta.at(static_cast<std::size_t>(i)).get<double>();
      model.b(i) = doc.at("b").at(static_cast<std::size_t>(i)).get<double>();
      for (Eigen::Index j = 0; j < d; ++j)
        model.C(i, j) =
            doc.at("C").at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j)).get<double>();
    }
    model.validate();
    return model;
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, path + ": " + e.what());
  }
}

void save_trace(const SolverReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path);
  const bool aligned = report.residuals.size() == report.g_history.size();
  for (std::size_t i = 0; i < report.g_history.size(); ++i) {
    json line;
    line["iteration"] = i;
    line["g"] = report.g_history[i];
    if (aligned) line["residual"] = report.residuals[i];
    out << line.dump() << '\n';
  }
  if (!out) fail(ErrorCode::io, "write failed for " + path);
}

}  // namespace drim
