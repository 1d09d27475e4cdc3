#include "moments.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace drim {

namespace {

using json = nlohmann::json;

constexpr std::uint64_t kPairTag = 1;
constexpr std::uint64_t kCrossTag = 2;
constexpr std::uint64_t kMeanTag = 3;

std::vector<Eigen::Index> joint_rows(const BoolArray& mask_i, const BoolArray& mask_j) {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index r = 0; r < mask_i.rows(); ++r)
    if (mask_i(r, 0) && mask_j(r, 0)) rows.push_back(r);
  return rows;
}

// Radius of the resampled product mean (1/m) sum x_i * x_j over k resamples
// of size m with replacement; sample standard deviation with k-1 denominator.
double product_radius(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                      const std::vector<Eigen::Index>& rows, int k, rng::Stream stream) {
  const std::size_t m = rows.size();
  assert(m >= 1);
  std::vector<double> means(static_cast<std::size_t>(k));
  for (int t = 0; t < k; ++t) {
    double acc = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const Eigen::Index row = rows[stream.next_below(m)];
      acc += xi(row) * xj(row);
    }
    means[static_cast<std::size_t>(t)] = acc / static_cast<double>(m);
  }
  double mean = 0.0;
  for (double v : means) mean += v;
  mean /= static_cast<double>(k);
  double ss = 0.0;
  for (double v : means) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(k - 1));
}

void require_k(int k) {
  if (k < 2) fail(ErrorCode::invalid_argument, "bootstrap radius needs k >= 2 resamples");
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto n = static_cast<Eigen::Index>(j.size());
  const auto d = n > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != d)
      fail(ErrorCode::parse, "ragged matrix in JSON document");
    for (Eigen::Index c = 0; c < d; ++c)
      m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

}  // namespace

Eigen::MatrixXd MomentEnvelope::c_min() const {
  Eigen::MatrixXd lo = C0 - c * Delta;
  for (Eigen::Index i = 0; i < dim(); ++i)
    for (Eigen::Index j = 0; j < dim(); ++j)
      if (flagged(i, j)) lo(i, j) = -flag_bound;
  return lo;
}

Eigen::MatrixXd MomentEnvelope::c_max() const {
  Eigen::MatrixXd hi = C0 + c * Delta;
  for (Eigen::Index i = 0; i < dim(); ++i)
    for (Eigen::Index j = 0; j < dim(); ++j)
      if (flagged(i, j)) hi(i, j) = flag_bound;
  return hi;
}

Eigen::VectorXd MomentEnvelope::b_min() const {
  Eigen::VectorXd lo = b0 - c * delta_b;
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (flagged_b(i)) lo(i) = -flag_bound;
  return lo;
}

Eigen::VectorXd MomentEnvelope::b_max() const {
  Eigen::VectorXd hi = b0 + c * delta_b;
  for (Eigen::Index i = 0; i < hi.size(); ++i)
    if (flagged_b(i)) hi(i) = flag_bound;
  return hi;
}

Eigen::VectorXd MomentEnvelope::mu_min() const {
  Eigen::VectorXd lo = mu0 - c * mu_delta;
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (flagged_mu(i)) lo(i) = -flag_bound;
  return lo;
}

Eigen::VectorXd MomentEnvelope::mu_max() const {
  Eigen::VectorXd hi = mu0 + c * mu_delta;
  for (Eigen::Index i = 0; i < hi.size(); ++i)
    if (flagged_mu(i)) hi(i) = flag_bound;
  return hi;
}

void MomentEnvelope::validate() const {
  const Eigen::Index d = dim();
  if (C0.cols() != d || Delta.rows() != d || Delta.cols() != d)
    fail(ErrorCode::invalid_argument, "envelope: C0/Delta shape mismatch");
  if (mu0.size() != d || mu_delta.size() != d)
    fail(ErrorCode::invalid_argument, "envelope: mu shape mismatch");
  if (has_target && (b0.size() != d || delta_b.size() != d))
    fail(ErrorCode::invalid_argument, "envelope: b shape mismatch");
  if (c < 0) fail(ErrorCode::invalid_argument, "envelope: c must be nonnegative");
  if (!C0.isApprox(C0.transpose(), 0.0))
    fail(ErrorCode::invalid_argument, "envelope: C0 not symmetric");
  if (!Delta.isApprox(Delta.transpose(), 0.0))
    fail(ErrorCode::invalid_argument, "envelope: Delta not symmetric");
  if ((Delta.array() < 0).any() || (mu_delta.array() < 0).any() ||
      (has_target && (delta_b.array() < 0).any()))
    fail(ErrorCode::invalid_argument, "envelope: negative radius");
}

PairMoments point_second_moment(const MaskedMatrix& m) {
  const Eigen::Index d = m.cols();
  PairMoments out;
  out.C0 = Eigen::MatrixXd::Zero(d, d);
  out.counts = CountMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i; j < d; ++j) {
      double acc = 0.0;
      std::int64_t cnt = 0;
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        if (m.mask(r, i) && m.mask(r, j)) {
          acc += m.values(r, i) * m.values(r, j);
          ++cnt;
        }
      const double v = cnt > 0 ? acc / static_cast<double>(cnt) : 0.0;
      out.C0(i, j) = out.C0(j, i) = v;
      out.counts(i, j) = out.counts(j, i) = cnt;
    }
  return out;
}

CrossMoments point_cross_moment(const MaskedMatrix& m, const MaskedVector& y) {
  if (y.size() != m.rows())
    fail(ErrorCode::invalid_argument, "cross moment: target length mismatch");
  const Eigen::Index d = m.cols();
  CrossMoments out;
  out.b0 = Eigen::VectorXd::Zero(d);
  out.counts = CountVector::Zero(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double acc = 0.0;
    std::int64_t cnt = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      if (m.mask(r, i) && y.mask(r)) {
        acc += m.values(r, i) * y.values(r);
        ++cnt;
      }
    out.b0(i) = cnt > 0 ? acc / static_cast<double>(cnt) : 0.0;
    out.counts(i) = cnt;
  }
  return out;
}

double bootstrap_radius(const MaskedMatrix& m, Eigen::Index i, Eigen::Index j, int k,
                        std::uint64_t seed) {
  require_k(k);
  const auto rows = joint_rows(m.mask.col(i), m.mask.col(j));
  if (rows.empty()) fail(ErrorCode::unavailable, "bootstrap radius: pair never jointly observed");
  return product_radius(m.values.col(i), m.values.col(j), rows, k,
                        rng::Stream(seed).derive(kPairTag, static_cast<std::uint64_t>(i),
                                                 static_cast<std::uint64_t>(j)));
}

double bootstrap_cross_radius(const MaskedMatrix& m, const MaskedVector& y, Eigen::Index i,
                              int k, std::uint64_t seed) {
  require_k(k);
  const auto rows = joint_rows(m.mask.col(i), y.mask);
  if (rows.empty())
    fail(ErrorCode::unavailable, "bootstrap radius: feature/target never jointly observed");
  return product_radius(m.values.col(i), y.values, rows, k,
                        rng::Stream(seed).derive(kCrossTag, static_cast<std::uint64_t>(i)));
}

double bootstrap_mean_radius(const MaskedVector& col, int k, std::uint64_t seed) {
  require_k(k);
  std::vector<Eigen::Index> rows;
  for (Eigen::Index r = 0; r < col.size(); ++r)
    if (col.mask(r)) rows.push_back(r);
  if (rows.empty()) fail(ErrorCode::unavailable, "bootstrap radius: empty column");
  const std::size_t m = rows.size();
  rng::Stream stream = rng::Stream(seed).derive(kMeanTag);
  std::vector<double> means(static_cast<std::size_t>(k));
  for (int t = 0; t < k; ++t) {
    double acc = 0.0;
    for (std::size_t r = 0; r < m; ++r) acc += col.values(rows[stream.next_below(m)]);
    means[static_cast<std::size_t>(t)] = acc / static_cast<double>(m);
  }
  double mean = 0.0;
  for (double v : means) mean += v;
  mean /= static_cast<double>(k);
  double ss = 0.0;
  for (double v : means) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(k - 1));
}

MomentEnvelope build_envelope(const MaskedMatrix& m, const MaskedVector* y, int k, double c,
                              std::uint64_t seed, int threads) {
  require_k(k);
  if (c < 0) fail(ErrorCode::invalid_argument, "envelope: c must be nonnegative");
  const Eigen::Index d = m.cols();

  MomentEnvelope env;
  env.c = c;
  env.k = k;
  env.seed = seed;
  env.column_names = m.column_names;
  env.has_target = y != nullptr;

  const PairMoments pm = point_second_moment(m);
  env.C0 = pm.C0;
  env.counts = pm.counts;
  env.flagged = pm.counts.array() == 0;
  if (env.flagged.all()) fail(ErrorCode::unavailable, "envelope: no feature pair jointly observed");
  env.flag_bound = 0.0;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (!env.flagged(i, j)) env.flag_bound = std::max(env.flag_bound, std::abs(env.C0(i, j)));

  env.Delta = Eigen::MatrixXd::Zero(d, d);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i; j < d; ++j)
      if (!env.flagged(i, j)) pairs.emplace_back(i, j);
  parallel_for(pairs.size(), threads, [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    const double r = bootstrap_radius(m, i, j, k, seed);
    env.Delta(i, j) = env.Delta(j, i) = r;
  });

  env.mu0 = Eigen::VectorXd::Zero(d);
  env.mu_delta = Eigen::VectorXd::Zero(d);
  env.counts_mu = CountVector::Zero(d);
  env.flagged_mu = BoolVector::Constant(d, true);
  for (Eigen::Index j2 = 0; j2 < d; ++j2) {
    const MaskedVector col = column_of(m, j2);
    const auto avail = static_cast<std::int64_t>(col.available_count());
    env.counts_mu(j2) = avail;
    if (avail == 0) continue;
    env.flagged_mu(j2) = false;
    double acc = 0.0;
    for (Eigen::Index r = 0; r < col.size(); ++r)
      if (col.mask(r)) acc += col.values(r);
    env.mu0(j2) = acc / static_cast<double>(avail);
  }
  parallel_for(static_cast<std::size_t>(d), threads, [&](std::size_t j2) {
    const auto idx = static_cast<Eigen::Index>(j2);
    if (env.flagged_mu(idx)) return;
    env.mu_delta(idx) = bootstrap_mean_radius(
        column_of(m, idx), k, rng::Stream(seed).derive(kMeanTag, j2).next_u64());
  });

  if (y) {
    double acc = 0.0;
    std::int64_t cnt = 0;
    for (Eigen::Index r = 0; r < y->size(); ++r)
      if (y->mask(r)) {
        acc += y->values(r);
        ++cnt;
      }
    env.target_mean = cnt > 0 ? acc / static_cast<double>(cnt) : 0.0;
    const CrossMoments cm = point_cross_moment(m, *y);
    env.b0 = cm.b0;
    env.counts_b = cm.counts;
    env.flagged_b = cm.counts.array() == 0;
    env.delta_b = Eigen::VectorXd::Zero(d);
    parallel_for(static_cast<std::size_t>(d), threads, [&](std::size_t i2) {
      const auto idx = static_cast<Eigen::Index>(i2);
      if (env.flagged_b(idx)) return;
      env.delta_b(idx) = bootstrap_cross_radius(m, *y, idx, k, seed);
    });
  } else {
    env.b0 = Eigen::VectorXd::Zero(d);
    env.delta_b = Eigen::VectorXd::Zero(d);
    env.counts_b = CountVector::Zero(d);
    env.flagged_b = BoolVector::Constant(d, true);
  }

  env.validate();
  return env;
}

void save_envelope(const MomentEnvelope& env, const std::string& path,
                   const std::string& config_json) {
  json doc;
  doc["type"] = "moment_envelope";
  doc["version"] = 1;
  doc["d"] = env.dim();
  doc["columns"] = env.column_names;
  doc["target"] = env.has_target ? json(env.target_name) : json(nullptr);
  doc["c"] = env.c;
  doc["k"] = env.k;
  doc["seed"] = env.seed;
  doc["C0"] = matrix_to_json(env.C0);
  doc["Delta"] = matrix_to_json(env.Delta);
  doc["mu0"] = vector_to_json(env.mu0);
  doc["mu_delta"] = vector_to_json(env.mu_delta);
  doc["flag_bound"] = env.flag_bound;
  json counts = json::array();
  for (Eigen::Index i = 0; i < env.dim(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < env.dim(); ++j) row.push_back(env.counts(i, j));
    counts.push_back(std::move(row));
  }
  doc["counts"] = std::move(counts);
  json flagged = json::array();
  for (Eigen::Index i = 0; i < env.dim(); ++i)
    for (Eigen::Index j = i; j < env.dim(); ++j)
      if (env.flagged(i, j)) flagged.push_back({i, j});
  doc["flagged_pairs"] = std::move(flagged);
  json flagged_mu = json::array();
  for (Eigen::Index i = 0; i < env.dim(); ++i)
    if (env.flagged_mu(i)) flagged_mu.push_back(i);
  doc["flagged_mu"] = std::move(flagged_mu);
  if (env.has_target) {
    doc["b0"] = vector_to_json(env.b0);
    doc["delta_b"] = vector_to_json(env.delta_b);
    doc["target_mean"] = env.target_mean;
    json counts_b = json::array();
    for (Eigen::Index i = 0; i < env.dim(); ++i) counts_b.push_back(env.counts_b(i));
    doc["counts_b"] = std::move(counts_b);
    json flagged_b = json::array();
    for (Eigen::Index i = 0; i < env.dim(); ++i)
      if (env.flagged_b(i)) flagged_b.push_back(i);
    doc["flagged_b"] = std::move(flagged_b);
  }
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

MomentEnvelope load_envelope(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, path + ": " + e.what());
  }
  try {
    if (doc.at("type").get<std::string>() != "moment_envelope")
      fail(ErrorCode::parse, path + ": not a moment envelope document");
    MomentEnvelope env;
    const auto d = doc.at("d").get<Eigen::Index>();
    env.column_names = doc.at("columns").get<std::vector<std::string>>();
    env.has_target = !doc.at("target").is_null();
    if (env.has_target) env.target_name = doc.at("target").get<std::string>();
    env.c = doc.at("c").get<double>();
    env.k = doc.at("k").get<int>();
    env.seed = doc.at("seed").get<std::uint64_t>();
    env.C0 = matrix_from_json(doc.at("C0"));
    env.Delta = matrix_from_json(doc.at("Delta"));
    env.mu0 = vector_from_json(doc.at("mu0"));
    env.mu_delta = vector_from_json(doc.at("mu_delta"));
    env.flag_bound = doc.at("flag_bound").get<double>();
    env.counts = CountMatrix::Zero(d, d);
    const auto& counts = doc.at("counts");
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j)
        env.counts(i, j) = counts.at(static_cast<std::size_t>(i))
                               .at(static_cast<std::size_t>(j))
                               .get<std::int64_t>();
    env.flagged = BoolArray::Constant(d, d, false);
    for (const auto& pair : doc.at("flagged_pairs")) {
      const auto i = pair.at(0).get<Eigen::Index>();
      const auto j = pair.at(1).get<Eigen::Index>();
      env.flagged(i, j) = env.flagged(j, i) = true;
    }
    env.flagged_mu = BoolVector::Constant(d, false);
    for (const auto& i : doc.at("flagged_mu")) env.flagged_mu(i.get<Eigen::Index>()) = true;
    env.flagged_b = BoolVector::Constant(d, !env.has_target);
    env.counts_b = CountVector::Zero(d);
    env.b0 = Eigen::VectorXd::Zero(d);
    env.delta_b = Eigen::VectorXd::Zero(d);
    if (env.has_target) {
      env.b0 = vector_from_json(doc.at("b0"));
      env.delta_b = vector_from_json(doc.at("delta_b"));
      env.target_mean = doc.value("target_mean", 0.0);
      const auto& counts_b = doc.at("counts_b");
      for (Eigen::Index i = 0; i < d; ++i)
        env.counts_b(i) = counts_b.at(static_cast<std::size_t>(i)).get<std::int64_t>();
      for (const auto& i : doc.at("flagged_b")) env.flagged_b(i.get<Eigen::Index>()) = true;
    }
    env.validate();
    if (env.C0.rows() != d) fail(ErrorCode::parse, path + ": dimension mismatch");
    return env;
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, path + ": " + e.what());
  }
}

}  // namespace drim
