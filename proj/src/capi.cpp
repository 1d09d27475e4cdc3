#include "drim.h"

#include <cstring>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "inference.hpp"
#include "lda.hpp"
#include "masked.hpp"
#include "missing.hpp"
#include "moments.hpp"

struct drim_dataset {
  drim::MaskedMatrix m;
};
struct drim_envelope {
  drim::MomentEnvelope env;
};
struct drim_regression {
  drim::RegressionModel model;
};
struct drim_lda {
  drim::LdaModel model;
};

namespace {

thread_local std::string g_last_error;
thread_local int g_last_converged = 0;

drim_status set_error(drim_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class F>
drim_status guarded(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DRIM_OK;
  } catch (const drim::Error& e) {
    return set_error(static_cast<drim_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(DRIM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(DRIM_ERR_INTERNAL, e.what());
  }
}

drim::TrainOptions to_train_options(const drim_train_options& opts) {
  drim::TrainOptions t;
  if (!opts.solver) drim::fail(drim::ErrorCode::invalid_argument, "solver name is null");
  t.solver = drim::solver_from_name(opts.solver);
  t.lambda = opts.lambda;
  t.c = opts.c;
  t.k = opts.k;
  t.rho = opts.rho;
  if (opts.max_iters < 0 || opts.max_iters > std::numeric_limits<int>::max())
    drim::fail(drim::ErrorCode::invalid_argument, "max_iters out of range");
  t.max_iters = static_cast<int>(opts.max_iters);
  t.tol = opts.tol;
  t.seed = opts.seed;
  t.threads = opts.threads;
  return t;
}

drim::MaskedVector target_column(const drim::MaskedMatrix& m, const char* name) {
  const int j = m.column_index(name);
  if (j < 0)
    drim::fail(drim::ErrorCode::invalid_argument,
               std::string("no column named '") + name + "'");
  return drim::column_of(m, j);
}

// Reorders the dataset's columns into the model's feature order; extra
// columns are dropped, an absent one is an error naming it.
drim::MaskedMatrix align_features(const drim::MaskedMatrix& m,
                                  const std::vector<std::string>& names) {
  drim::MaskedMatrix out;
  out.column_names = names;
  out.values.resize(m.rows(), static_cast<Eigen::Index>(names.size()));
  out.mask.resize(m.rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t k = 0; k < names.size(); ++k) {
    const int j = m.column_index(names[k]);
    if (j < 0)
      drim::fail(drim::ErrorCode::invalid_argument,
                 "data is missing model feature column '" + names[k] + "'");
    out.values.col(static_cast<Eigen::Index>(k)) = m.values.col(j);
    out.mask.col(static_cast<Eigen::Index>(k)) = m.mask.col(j);
  }
  return out;
}

void train_into(const drim::MomentEnvelope& env, const drim::TrainOptions& topts,
                const char* trace_path, drim_regression** out) {
  try {
    auto [model, report] = drim::train_regression_from_envelope(env, topts);
    if (trace_path) drim::save_trace(report, trace_path);
    g_last_converged = report.converged ? 1 : 0;
    *out = new drim_regression{std::move(model)};
  } catch (const drim::DivergedError& e) {
    g_last_converged = 0;
    if (trace_path) drim::save_trace(e.report, trace_path);
    throw;
  }
}

}  // namespace

extern "C" {

const char* drim_version(void) { return "0.1.0"; }

const char* drim_last_error(void) { return g_last_error.c_str(); }

int drim_last_train_converged(void) { return g_last_converged; }

/* ---- datasets -------------------------------------------------------- */

drim_status drim_dataset_load_csv(const char* path, const char* missing_token,
                                  drim_dataset** out) {
  if (!path || !out) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new drim_dataset{drim::load_csv(path, missing_token ? missing_token : "NA")};
  });
}

drim_status drim_dataset_save_csv(const drim_dataset* data, const char* path) {
  if (!data || !path) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { drim::save_csv(data->m, path); });
}

drim_status drim_dataset_from_arrays(const double* values, const uint8_t* mask,
                                     int64_t rows, int64_t cols,
                                     const char* const* column_names, drim_dataset** out) {
  if (!values || !out) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  if (rows < 1 || cols < 1)
    return set_error(DRIM_ERR_INVALID_ARGUMENT, "rows and cols must be positive");
  return guarded([&] {
    drim::MaskedMatrix m;
    m.values.resize(rows, cols);
    m.mask.resize(rows, cols);
    for (int64_t r = 0; r < rows; ++r)
      for (int64_t c = 0; c < cols; ++c) {
        const bool avail = mask ? mask[r * cols + c] != 0 : true;
        m.mask(r, c) = avail;
        m.values(r, c) =
            avail ? values[r * cols + c] : std::numeric_limits<double>::quiet_NaN();
      }
    m.column_names.reserve(static_cast<std::size_t>(cols));
    for (int64_t c = 0; c < cols; ++c)
      m.column_names.push_back(column_names && column_names[c]
                                   ? std::string(column_names[c])
                                   : "x" + std::to_string(c));
    m.validate();
    *out = new drim_dataset{std::move(m)};
  });
}

void drim_dataset_free(drim_dataset* data) { delete data; }

int64_t drim_dataset_rows(const drim_dataset* data) { return data ? data->m.rows() : 0; }

int64_t drim_dataset_cols(const drim_dataset* data) { return data ? data->m.cols() : 0; }

drim_status drim_dataset_missing_fraction(const drim_dataset* data, double* out) {
  if (!data || !out) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = data->m.missing_fraction(); });
}

const char* drim_dataset_column_name(const drim_dataset* data, int64_t j) {
  if (!data || j < 0 || j >= data->m.cols()) return nullptr;
  return data->m.column_names[static_cast<std::size_t>(j)].c_str();
}

int64_t drim_dataset_column_index(const drim_dataset* data, const char* name) {
  if (!data || !name) return -1;
  return data->m.column_index(name);
}

drim_status drim_dataset_copy(const drim_dataset* data, double* values, uint8_t* mask) {
  if (!data) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const int64_t rows = data->m.rows(), cols = data->m.cols();
    for (int64_t r = 0; r < rows; ++r)
      for (int64_t c = 0; c < cols; ++c) {
        if (values) values[r * cols + c] = data->m.values(r, c);
        if (mask) mask[r * cols + c] = data->m.mask(r, c) ? 1 : 0;
      }
  });
}

drim_status drim_dataset_apply_mcar(const drim_dataset* data, double p, uint64_t seed,
                                    drim_dataset** out) {
  if (!data || !out) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new drim_dataset{drim::apply_mcar(data->m, p, seed)}; });
}

drim_status drim_dataset_apply_mnar(const drim_dataset* data, double a, double b,
                                    uint64_t seed, drim_dataset** out) {
  if (!data || !out) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new drim_dataset{drim::apply_mnar(data->m, a, b, seed)}; });
}

/* ---- moment envelopes ------------------------------------------------ */

drim_status drim_envelope_estimate(const drim_dataset* data, const char* target,
                                   int k, double c, uint64_t seed, int threads,
                                   drim_envelope** out) {
  if (!data || !out) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    if (!target) {
      *out = new drim_envelope{drim::build_envelope(data->m, nullptr, k, c, seed, threads)};
      return;
    }
    const drim::MaskedVector y = target_column(data->m, target);
    const drim::MaskedMatrix X = data->m.drop_column(data->m.column_index(target));
    drim::MomentEnvelope env = drim::build_envelope(X, &y, k, c, seed, threads);
    env.target_name = target;
    *out = new drim_envelope{std::move(env)};
  });
}

drim_status drim_envelope_save(const drim_envelope* env, const char* path,
                               const char* config_json) {
  if (!env || !path) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    drim::save_envelope(env->env, path, config_json ? config_json : "");
  });
}

drim_status drim_envelope_load(const char* path, drim_envelope** out) {
  if (!path || !out) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new drim_envelope{drim::load_envelope(path)}; });
}

void drim_envelope_free(drim_envelope* env) { delete env; }

int64_t drim_envelope_dim(const drim_envelope* env) { return env ? env->env.dim() : 0; }

/* ---- robust regression ----------------------------------------------- */

void drim_train_options_init(drim_train_options* opts) {
  if (!opts) return;
  opts->solver = "pga";
  opts->lambda = 0.1;
  opts->c = 2.0;
  opts->k = 30;
  opts->rho = 1.0;
  opts->max_iters = 0;
  opts->tol = 0.0;
  opts->seed = 0;
  opts->threads = 1;
}

drim_status drim_train_regression(const drim_dataset* data, const char* target,
                                  const drim_train_options* opts, const char* trace_path,
                                  drim_regression** out) {
  if (!data || !target || !opts || !out)
    return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const drim::TrainOptions topts = to_train_options(*opts);
    const drim::MaskedVector y = target_column(data->m, target);
    const drim::MaskedMatrix X = data->m.drop_column(data->m.column_index(target));
    drim::MomentEnvelope env =
        drim::build_envelope(X, &y, topts.k, topts.c, topts.seed, topts.threads);
    env.target_name = target;
    train_into(env, topts, trace_path, out);
  });
}

drim_status drim_train_regression_from_envelope(const drim_envelope* env,
                                                const drim_train_options* opts,
                                                const char* trace_path,
                                                drim_regression** out) {
  if (!env || !opts || !out) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { train_into(env->env, to_train_options(*opts), trace_path, out); });
}

drim_status drim_regression_save(const drim_regression* model, const char* path,
                                 const char* config_json) {
  if (!model || !path) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    drim::save_regression_model(model->model, path, config_json ? config_json : "");
  });
}

drim_status drim_regression_load(const char* path, drim_regression** out) {
  if (!path || !out) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new drim_regression{drim::load_regression_model(path)}; });
}

void drim_regression_free(drim_regression* model) { delete model; }

int64_t drim_regression_dim(const drim_regression* model) {
  return model ? model->model.theta.size() : 0;
}

const char* drim_regression_target_name(const drim_regression* model) {
  return model ? model->model.target_name.c_str() : nullptr;
}

drim_status drim_regression_coefficients(const drim_regression* model, double* out) {
  if (!model || !out) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    for (Eigen::Index i = 0; i < model->model.theta.size(); ++i) out[i] = model->model.theta(i);
  });
}

drim_status drim_regression_predict(const drim_regression* model,
                                    const drim_dataset* features, double* out) {
  if (!model || !features || !out) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const drim::MaskedMatrix aligned =
        align_features(features->m, model->model.feature_names);
    const Eigen::VectorXd pred = drim::predict_batch(model->model, aligned);
    for (Eigen::Index r = 0; r < pred.size(); ++r) out[r] = pred(r);
  });
}

drim_status drim_impute(const drim_dataset* data, const drim_train_options* opts,
                        drim_dataset** out) {
  if (!data || !opts || !out) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const drim::TrainOptions topts = to_train_options(*opts);
    drim::ImputeOptions io;
    io.solver = topts.solver;
    io.lambda = topts.lambda;
    io.c = topts.c;
    io.k = topts.k;
    io.rho = topts.rho;
    io.seed = topts.seed;
    io.threads = topts.threads;
    *out = new drim_dataset{drim::impute(data->m, io)};
  });
}

/* ---- robust discriminant analysis ------------------------------------ */

void drim_lda_options_init(drim_lda_options* opts) {
  if (!opts) return;
  opts->k = 5;
  opts->iters = 100;
  opts->alpha = 0.05;
  opts->n_mc = 512;
  opts->delta_scale = 0.1;
  opts->mu_c = 2.0;
  opts->em_rounds = 5;
  opts->seed = 0;
}

drim_status drim_train_lda(const drim_dataset* data, const char* label_column,
                           const drim_lda_options* opts, drim_lda** out) {
  if (!data || !label_column || !opts || !out)
    return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const drim::MaskedVector ycol = target_column(data->m, label_column);
    std::vector<int> labels(static_cast<std::size_t>(ycol.size()));
    for (Eigen::Index r = 0; r < ycol.size(); ++r) {
      if (!ycol.mask(r)) {
        labels[static_cast<std::size_t>(r)] = -1;
      } else if (ycol.values(r) == 0.0 || ycol.values(r) == 1.0) {
        labels[static_cast<std::size_t>(r)] = static_cast<int>(ycol.values(r));
      } else {
        drim::fail(drim::ErrorCode::invalid_argument,
                   "label column '" + std::string(label_column) + "' row " +
                       std::to_string(r + 1) + " is not 0 or 1");
      }
    }
    const drim::MaskedMatrix X = data->m.drop_column(data->m.column_index(label_column));
    drim::RndaOptions ropts;
    ropts.k = opts->k;
    ropts.iters = opts->iters;
    ropts.alpha = opts->alpha;
    ropts.n_mc = opts->n_mc;
    ropts.delta_scale = opts->delta_scale;
    ropts.mu_c = opts->mu_c;
    ropts.seed = opts->seed;
    drim::LdaModel model = drim::em_rnda_train(X, labels, opts->em_rounds, ropts);
    model.label_name = label_column;
    *out = new drim_lda{std::move(model)};
  });
}

drim_status drim_lda_save(const drim_lda* model, const char* path, const char* config_json) {
  if (!model || !path) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    drim::save_lda_model(model->model, path, config_json ? config_json : "");
  });
}

drim_status drim_lda_load(const char* path, drim_lda** out) {
  if (!path || !out) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new drim_lda{drim::load_lda_model(path)}; });
}

void drim_lda_free(drim_lda* model) { delete model; }

int64_t drim_lda_dim(const drim_lda* model) { return model ? model->model.w.size() : 0; }

const char* drim_lda_label_name(const drim_lda* model) {
  return model ? model->model.label_name.c_str() : nullptr;
}

drim_status drim_lda_classify(const drim_lda* model, const drim_dataset* features,
                              int32_t* out) {
  if (!model || !features || !out) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const drim::MaskedMatrix aligned =
        align_features(features->m, model->model.feature_names);
    const std::vector<int> labels = drim::classify_batch(model->model, aligned);
    for (std::size_t r = 0; r < labels.size(); ++r)
      out[r] = static_cast<int32_t>(labels[r]);
  });
}

/* ---- evaluation ------------------------------------------------------- */

drim_status drim_model_type(const char* path, char* buf, int64_t cap) {
  if (!path || !buf || cap < 1) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::ifstream in(path);
    if (!in) drim::fail(drim::ErrorCode::io, std::string("cannot open ") + path);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      drim::fail(drim::ErrorCode::parse, std::string(path) + ": " + e.what());
    }
    if (!doc.contains("type") || !doc["type"].is_string())
      drim::fail(drim::ErrorCode::parse, std::string(path) + ": no type field");
    const std::string type = doc["type"].get<std::string>();
    if (static_cast<int64_t>(type.size()) + 1 > cap)
      drim::fail(drim::ErrorCode::invalid_argument, "type buffer too small");
    std::memcpy(buf, type.c_str(), type.size() + 1);
  });
}

drim_status drim_nrmse(const double* y_true, const double* y_pred, int64_t n, double* out) {
  if (!y_true || !y_pred || !out) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = drim::nrmse(Eigen::Map<const Eigen::VectorXd>(y_true, n),
                       Eigen::Map<const Eigen::VectorXd>(y_pred, n));
  });
}

drim_status drim_accuracy(const double* y_true, const double* y_pred, int64_t n, double* out) {
  if (!y_true || !y_pred || !out) return set_error(DRIM_ERR_INVALID_ARGUMENT, "null argument");
  if (n < 1) return set_error(DRIM_ERR_INVALID_ARGUMENT, "accuracy needs at least one row");
  return guarded([&] {
    int64_t hits = 0;
    for (int64_t i = 0; i < n; ++i)
      if (std::llround(y_true[i]) == std::llround(y_pred[i])) ++hits;
    *out = static_cast<double>(hits) / static_cast<double>(n);
  });
}

}  // extern "C"
