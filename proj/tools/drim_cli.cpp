// drim: robust regression, discriminant analysis, and imputation on data
// with missing values, through the shared C API.
#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <string>
#include <vector>

#include "drim.h"

namespace {

using json = nlohmann::json;

using dataset_ptr = std::unique_ptr<drim_dataset, decltype(&drim_dataset_free)>;
using envelope_ptr = std::unique_ptr<drim_envelope, decltype(&drim_envelope_free)>;
using regression_ptr = std::unique_ptr<drim_regression, decltype(&drim_regression_free)>;
using lda_ptr = std::unique_ptr<drim_lda, decltype(&drim_lda_free)>;

int fail(drim_status status) {
  std::cerr << "error: " << drim_last_error() << "\n";
  return static_cast<int>(status);
}

int fail(const std::string& message, int code = 1) {
  std::cerr << "error: " << message << "\n";
  return code;
}

dataset_ptr load_dataset(const std::string& path, const std::string& missing_token,
                         drim_status* status) {
  drim_dataset* raw = nullptr;
  *status = drim_dataset_load_csv(path.c_str(), missing_token.c_str(), &raw);
  return dataset_ptr(raw, &drim_dataset_free);
}

void print_config(const json& config) { std::cout << "config: " << config.dump() << "\n"; }

// CSV artifacts cannot embed provenance, so it rides in a sidecar file.
int write_meta(const std::string& artifact_path, const json& config) {
  const std::string path = artifact_path + ".meta.json";
  std::ofstream out(path);
  out << json{{"config", config}}.dump(2) << "\n";
  if (!out) return fail("cannot write " + path, static_cast<int>(DRIM_ERR_IO));
  return 0;
}

// Column values from a CSV, with availability; -1 entries of *status on error.
struct Column {
  std::vector<double> values;
  std::vector<uint8_t> mask;
};

int extract_column(const drim_dataset* data, const std::string& path,
                   const std::string& column, Column* out) {
  const int64_t j = drim_dataset_column_index(data, column.c_str());
  if (j < 0) return fail(path + " has no column named '" + column + "'");
  const int64_t rows = drim_dataset_rows(data);
  const int64_t cols = drim_dataset_cols(data);
  std::vector<double> values(static_cast<std::size_t>(rows * cols));
  std::vector<uint8_t> mask(static_cast<std::size_t>(rows * cols));
  const drim_status st = drim_dataset_copy(data, values.data(), mask.data());
  if (st != DRIM_OK) return fail(st);
  out->values.resize(static_cast<std::size_t>(rows));
  out->mask.resize(static_cast<std::size_t>(rows));
  for (int64_t r = 0; r < rows; ++r) {
    out->values[static_cast<std::size_t>(r)] = values[static_cast<std::size_t>(r * cols + j)];
    out->mask[static_cast<std::size_t>(r)] = mask[static_cast<std::size_t>(r * cols + j)];
  }
  return 0;
}

struct GenerateArgs {
  std::string input, output, mechanism = "mcar", missing_token = "NA";
  double p = 0.2, a = 1.0, b = 0.0;
  uint64_t seed = 0;
};

int cmd_generate_missing(const GenerateArgs& args) {
  const json config{{"command", "generate-missing"}, {"input", args.input},
                    {"output", args.output},         {"mechanism", args.mechanism},
                    {"p", args.p},                   {"a", args.a},
                    {"b", args.b},                   {"seed", args.seed},
                    {"missing_token", args.missing_token}};
  print_config(config);

  drim_status st;
  const dataset_ptr data = load_dataset(args.input, args.missing_token, &st);
  if (st != DRIM_OK) return fail(st);

  drim_dataset* raw = nullptr;
  st = args.mechanism == "mcar"
           ? drim_dataset_apply_mcar(data.get(), args.p, args.seed, &raw)
           : drim_dataset_apply_mnar(data.get(), args.a, args.b, args.seed, &raw);
  if (st != DRIM_OK) return fail(st);
  const dataset_ptr masked(raw, &drim_dataset_free);

  st = drim_dataset_save_csv(masked.get(), args.output.c_str());
  if (st != DRIM_OK) return fail(st);
  if (const int rc = write_meta(args.output, config)) return rc;

  double fraction = 0.0;
  st = drim_dataset_missing_fraction(masked.get(), &fraction);
  if (st != DRIM_OK) return fail(st);
  std::printf("missing_fraction: %.6f\n", fraction);
  return 0;
}

struct EstimateArgs {
  std::string input, output, target, missing_token = "NA";
  int k = 30, threads = 1;
  double c = 2.0;
  uint64_t seed = 0;
};

int cmd_estimate_moments(const EstimateArgs& args) {
  json config{{"command", "estimate-moments"}, {"input", args.input},
              {"output", args.output},         {"k", args.k},
              {"c", args.c},                   {"seed", args.seed},
              {"threads", args.threads},       {"missing_token", args.missing_token}};
  if (!args.target.empty()) config["target"] = args.target;
  print_config(config);

  drim_status st;
  const dataset_ptr data = load_dataset(args.input, args.missing_token, &st);
  if (st != DRIM_OK) return fail(st);

  drim_envelope* raw = nullptr;
  st = drim_envelope_estimate(data.get(), args.target.empty() ? nullptr : args.target.c_str(),
                              args.k, args.c, args.seed, args.threads, &raw);
  if (st != DRIM_OK) return fail(st);
  const envelope_ptr env(raw, &drim_envelope_free);

  st = drim_envelope_save(env.get(), args.output.c_str(), config.dump().c_str());
  if (st != DRIM_OK) return fail(st);
  return 0;
}

struct TrainRegressionArgs {
  std::string input, envelope, target, output, trace, missing_token = "NA";
  std::string solver = "pga";
  double lambda = 0.1, c = 2.0, rho = 1.0, tol = 0.0;
  int k = 30, threads = 1;
  int64_t iters = 0;
  uint64_t seed = 0;
};

int cmd_train_regression(const TrainRegressionArgs& args) {
  if (args.input.empty() == args.envelope.empty())
    return fail("give exactly one of --input or --envelope");
  if (!args.input.empty() && args.target.empty())
    return fail("--target is required with --input");

  const std::string trace_path =
      args.trace.empty() ? args.output + ".trace.jsonl" : args.trace;
  json config{{"command", "train-regression"},
              {"output", args.output},
              {"trace", trace_path},
              {"solver", args.solver},
              {"lambda", args.lambda},
              {"c", args.c},
              {"k", args.k},
              {"rho", args.rho},
              {"iters", args.iters},
              {"tol", args.tol},
              {"seed", args.seed},
              {"threads", args.threads}};
  if (!args.input.empty()) {
    config["input"] = args.input;
    config["target"] = args.target;
    config["missing_token"] = args.missing_token;
  } else {
    config["envelope"] = args.envelope;
  }
  print_config(config);

  drim_train_options opts;
  drim_train_options_init(&opts);
  opts.solver = args.solver.c_str();
  opts.lambda = args.lambda;
  opts.c = args.c;
  opts.k = args.k;
  opts.rho = args.rho;
  opts.max_iters = args.iters;
  opts.tol = args.tol;
  opts.seed = args.seed;
  opts.threads = args.threads;

  drim_status st;
  drim_regression* raw = nullptr;
  if (!args.input.empty()) {
    const dataset_ptr data = load_dataset(args.input, args.missing_token, &st);
    if (st != DRIM_OK) return fail(st);
    st = drim_train_regression(data.get(), args.target.c_str(), &opts, trace_path.c_str(),
                               &raw);
  } else {
    drim_envelope* env_raw = nullptr;
    st = drim_envelope_load(args.envelope.c_str(), &env_raw);
    if (st != DRIM_OK) return fail(st);
    const envelope_ptr env(env_raw, &drim_envelope_free);
    st = drim_train_regression_from_envelope(env.get(), &opts, trace_path.c_str(), &raw);
  }
  if (st != DRIM_OK) return fail(st);
  const regression_ptr model(raw, &drim_regression_free);

  st = drim_regression_save(model.get(), args.output.c_str(), config.dump().c_str());
  if (st != DRIM_OK) return fail(st);
  if (!drim_last_train_converged())
    return fail("solver did not reach its tolerance within the iteration cap");
  std::cout << "converged: yes\n";
  return 0;
}

struct TrainLdaArgs {
  std::string input, label, output, missing_token = "NA";
  int k = 5, iters = 100, n_mc = 512, em_rounds = 5;
  double alpha = 0.05, delta_scale = 0.1, mu_c = 2.0;
  uint64_t seed = 0;
};

int cmd_train_lda(const TrainLdaArgs& args) {
  const json config{{"command", "train-lda"},
                    {"input", args.input},
                    {"label", args.label},
                    {"output", args.output},
                    {"k", args.k},
                    {"iters", args.iters},
                    {"alpha", args.alpha},
                    {"n_mc", args.n_mc},
                    {"delta_scale", args.delta_scale},
                    {"mu_c", args.mu_c},
                    {"em_rounds", args.em_rounds},
                    {"seed", args.seed},
                    {"missing_token", args.missing_token}};
  print_config(config);

  drim_status st;
  const dataset_ptr data = load_dataset(args.input, args.missing_token, &st);
  if (st != DRIM_OK) return fail(st);

  drim_lda_options opts;
  drim_lda_options_init(&opts);
  opts.k = args.k;
  opts.iters = args.iters;
  opts.alpha = args.alpha;
  opts.n_mc = args.n_mc;
  opts.delta_scale = args.delta_scale;
  opts.mu_c = args.mu_c;
  opts.em_rounds = args.em_rounds;
  opts.seed = args.seed;

  drim_lda* raw = nullptr;
  st = drim_train_lda(data.get(), args.label.c_str(), &opts, &raw);
  if (st != DRIM_OK) return fail(st);
  const lda_ptr model(raw, &drim_lda_free);

  st = drim_lda_save(model.get(), args.output.c_str(), config.dump().c_str());
  if (st != DRIM_OK) return fail(st);
  return 0;
}

struct PredictArgs {
  std::string model, input, output, missing_token = "NA";
};

int cmd_predict(const PredictArgs& args) {
  const json config{{"command", "predict"},
                    {"model", args.model},
                    {"input", args.input},
                    {"output", args.output},
                    {"missing_token", args.missing_token}};
  print_config(config);

  char type[64];
  drim_status st = drim_model_type(args.model.c_str(), type, sizeof type);
  if (st != DRIM_OK) return fail(st);

  const dataset_ptr data = load_dataset(args.input, args.missing_token, &st);
  if (st != DRIM_OK) return fail(st);
  const int64_t rows = drim_dataset_rows(data.get());

  std::vector<double> predictions(static_cast<std::size_t>(rows));
  std::string column;
  if (std::string(type) == "regression_model") {
    drim_regression* raw = nullptr;
    st = drim_regression_load(args.model.c_str(), &raw);
    if (st != DRIM_OK) return fail(st);
    const regression_ptr model(raw, &drim_regression_free);
    st = drim_regression_predict(model.get(), data.get(), predictions.data());
    if (st != DRIM_OK) return fail(st);
    column = drim_regression_target_name(model.get());
  } else if (std::string(type) == "lda_model") {
    drim_lda* raw = nullptr;
    st = drim_lda_load(args.model.c_str(), &raw);
    if (st != DRIM_OK) return fail(st);
    const lda_ptr model(raw, &drim_lda_free);
    std::vector<int32_t> labels(static_cast<std::size_t>(rows));
    st = drim_lda_classify(model.get(), data.get(), labels.data());
    if (st != DRIM_OK) return fail(st);
    for (int64_t r = 0; r < rows; ++r)
      predictions[static_cast<std::size_t>(r)] = labels[static_cast<std::size_t>(r)];
    column = drim_lda_label_name(model.get());
  } else {
    return fail(args.model + " is a " + type + ", not a predictive model");
  }
  if (column.empty()) column = "prediction";

  const char* names[] = {column.c_str()};
  drim_dataset* raw_out = nullptr;
  st = drim_dataset_from_arrays(predictions.data(), nullptr, rows, 1, names, &raw_out);
  if (st != DRIM_OK) return fail(st);
  const dataset_ptr out(raw_out, &drim_dataset_free);
  st = drim_dataset_save_csv(out.get(), args.output.c_str());
  if (st != DRIM_OK) return fail(st);
  return write_meta(args.output, config);
}

struct ImputeArgs {
  std::string input, output, missing_token = "NA";
  std::string solver = "pga";
  double lambda = 0.1, c = 2.0, rho = 1.0;
  int k = 30, threads = 1;
  uint64_t seed = 0;
};

int cmd_impute(const ImputeArgs& args) {
  const json config{{"command", "impute"}, {"input", args.input},
                    {"output", args.output}, {"solver", args.solver},
                    {"lambda", args.lambda}, {"c", args.c},
                    {"k", args.k},           {"rho", args.rho},
                    {"seed", args.seed},     {"threads", args.threads},
                    {"missing_token", args.missing_token}};
  print_config(config);

  drim_status st;
  const dataset_ptr data = load_dataset(args.input, args.missing_token, &st);
  if (st != DRIM_OK) return fail(st);

  drim_train_options opts;
  drim_train_options_init(&opts);
  opts.solver = args.solver.c_str();
  opts.lambda = args.lambda;
  opts.c = args.c;
  opts.k = args.k;
  opts.rho = args.rho;
  opts.seed = args.seed;
  opts.threads = args.threads;

  drim_dataset* raw = nullptr;
  st = drim_impute(data.get(), &opts, &raw);
  if (st != DRIM_OK) return fail(st);
  const dataset_ptr filled(raw, &drim_dataset_free);

  st = drim_dataset_save_csv(filled.get(), args.output.c_str());
  if (st != DRIM_OK) return fail(st);
  return write_meta(args.output, config);
}

struct EvaluateArgs {
  std::string pred, truth, column, metric = "nrmse", jsonl, label, missing_token = "NA";
};

int cmd_evaluate(const EvaluateArgs& args) {
  json config{{"command", "evaluate"}, {"pred", args.pred},
              {"truth", args.truth},   {"column", args.column},
              {"metric", args.metric}, {"missing_token", args.missing_token}};
  if (!args.jsonl.empty()) config["jsonl"] = args.jsonl;
  if (!args.label.empty()) config["label"] = args.label;
  print_config(config);

  drim_status st;
  const dataset_ptr pred = load_dataset(args.pred, args.missing_token, &st);
  if (st != DRIM_OK) return fail(st);
  const dataset_ptr truth = load_dataset(args.truth, args.missing_token, &st);
  if (st != DRIM_OK) return fail(st);
  if (drim_dataset_rows(pred.get()) != drim_dataset_rows(truth.get()))
    return fail("prediction and truth row counts differ");

  Column pred_col, truth_col;
  if (const int rc = extract_column(pred.get(), args.pred, args.column, &pred_col)) return rc;
  if (const int rc = extract_column(truth.get(), args.truth, args.column, &truth_col))
    return rc;

  std::vector<double> y_true, y_pred;
  for (std::size_t r = 0; r < truth_col.values.size(); ++r)
    if (truth_col.mask[r] && pred_col.mask[r]) {
      y_true.push_back(truth_col.values[r]);
      y_pred.push_back(pred_col.values[r]);
    }
  if (y_true.empty()) return fail("no rows where both prediction and truth are available");

  double value = 0.0;
  st = args.metric == "nrmse"
           ? drim_nrmse(y_true.data(), y_pred.data(),
                        static_cast<int64_t>(y_true.size()), &value)
           : drim_accuracy(y_true.data(), y_pred.data(),
                           static_cast<int64_t>(y_true.size()), &value);
  if (st != DRIM_OK) return fail(st);

  json line{{"metric", args.metric},
            {"value", value},
            {"rows", y_true.size()},
            {"config", config}};
  if (!args.label.empty()) line["label"] = args.label;
  std::cout << line.dump() << "\n";
  if (!args.jsonl.empty()) {
    std::ofstream out(args.jsonl, std::ios::app);
    out << line.dump() << "\n";
    if (!out) return fail("cannot write " + args.jsonl, static_cast<int>(DRIM_ERR_IO));
  }
  std::printf("%s: %.10g\n", args.metric.c_str(), value);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributionally robust regression, discriminant analysis, and "
               "imputation on data with missing values"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(drim_version()));

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate-missing", "Mask cells of a complete CSV");
  gen_cmd->add_option("--input", gen.input, "Input CSV")->required();
  gen_cmd->add_option("--output", gen.output, "Output CSV")->required();
  gen_cmd->add_option("--mechanism", gen.mechanism, "mcar or mnar")
      ->check(CLI::IsMember({"mcar", "mnar"}));
  gen_cmd->add_option("--p", gen.p, "Missing probability (mcar)");
  gen_cmd->add_option("--a", gen.a, "Self-censoring slope (mnar)");
  gen_cmd->add_option("--b", gen.b, "Self-censoring offset (mnar)");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--missing-token", gen.missing_token, "Missing-cell token");
  gen_cmd->set_config("--config");

  EstimateArgs est;
  auto* est_cmd =
      app.add_subcommand("estimate-moments", "Estimate a moment envelope from a CSV");
  est_cmd->add_option("--input", est.input, "Input CSV")->required();
  est_cmd->add_option("--output", est.output, "Envelope JSON")->required();
  est_cmd->add_option("--target", est.target, "Target column for cross moments");
  est_cmd->add_option("--k", est.k, "Bootstrap resamples");
  est_cmd->add_option("--c", est.c, "Radius multiplier");
  est_cmd->add_option("--seed", est.seed, "Random seed");
  est_cmd->add_option("--threads", est.threads, "Worker threads");
  est_cmd->add_option("--missing-token", est.missing_token, "Missing-cell token");
  est_cmd->set_config("--config");

  TrainRegressionArgs reg;
  auto* reg_cmd = app.add_subcommand("train-regression", "Train a robust linear regression");
  reg_cmd->add_option("--input", reg.input, "Training CSV");
  reg_cmd->add_option("--envelope", reg.envelope, "Prebuilt envelope JSON");
  reg_cmd->add_option("--target", reg.target, "Target column");
  reg_cmd->add_option("--output", reg.output, "Model JSON")->required();
  reg_cmd->add_option("--trace", reg.trace, "Trace JSONL (default <output>.trace.jsonl)");
  reg_cmd->add_option("--solver", reg.solver, "pga, nesterov, or admm")
      ->check(CLI::IsMember({"pga", "nesterov", "admm"}));
  reg_cmd->add_option("--lambda", reg.lambda, "Ridge weight");
  reg_cmd->add_option("--c", reg.c, "Envelope radius multiplier");
  reg_cmd->add_option("--k", reg.k, "Bootstrap resamples");
  reg_cmd->add_option("--rho", reg.rho, "ADMM penalty");
  reg_cmd->add_option("--iters", reg.iters, "Iteration cap (0 = solver default)");
  reg_cmd->add_option("--tol", reg.tol, "Stopping tolerance (0 = solver default)");
  reg_cmd->add_option("--seed", reg.seed, "Random seed");
  reg_cmd->add_option("--threads", reg.threads, "Worker threads");
  reg_cmd->add_option("--missing-token", reg.missing_token, "Missing-cell token");
  reg_cmd->set_config("--config");

  TrainLdaArgs lda;
  auto* lda_cmd = app.add_subcommand("train-lda", "Train a robust discriminant classifier");
  lda_cmd->add_option("--input", lda.input, "Training CSV")->required();
  lda_cmd->add_option("--label", lda.label, "0/1 label column")->required();
  lda_cmd->add_option("--output", lda.output, "Model JSON")->required();
  lda_cmd->add_option("--k", lda.k, "Covariance candidates per class");
  lda_cmd->add_option("--iters", lda.iters, "Gradient iterations");
  lda_cmd->add_option("--alpha", lda.alpha, "Step size");
  lda_cmd->add_option("--n-mc", lda.n_mc, "Monte-Carlo draws per loss");
  lda_cmd->add_option("--delta-scale", lda.delta_scale, "Simplex regularization scale");
  lda_cmd->add_option("--mu-c", lda.mu_c, "Mean-box radius multiplier");
  lda_cmd->add_option("--em-rounds", lda.em_rounds, "EM rounds for missing labels");
  lda_cmd->add_option("--seed", lda.seed, "Random seed");
  lda_cmd->add_option("--missing-token", lda.missing_token, "Missing-cell token");
  lda_cmd->set_config("--config");

  PredictArgs pred;
  auto* pred_cmd = app.add_subcommand("predict", "Predict with a trained model");
  pred_cmd->add_option("--model", pred.model, "Model JSON")->required();
  pred_cmd->add_option("--input", pred.input, "Feature CSV")->required();
  pred_cmd->add_option("--output", pred.output, "Prediction CSV")->required();
  pred_cmd->add_option("--missing-token", pred.missing_token, "Missing-cell token");
  pred_cmd->set_config("--config");

  ImputeArgs imp;
  auto* imp_cmd = app.add_subcommand("impute", "Fill missing cells by robust regression");
  imp_cmd->add_option("--input", imp.input, "Input CSV")->required();
  imp_cmd->add_option("--output", imp.output, "Completed CSV")->required();
  imp_cmd->add_option("--solver", imp.solver, "pga, nesterov, or admm")
      ->check(CLI::IsMember({"pga", "nesterov", "admm"}));
  imp_cmd->add_option("--lambda", imp.lambda, "Ridge weight");
  imp_cmd->add_option("--c", imp.c, "Envelope radius multiplier");
  imp_cmd->add_option("--k", imp.k, "Bootstrap resamples");
  imp_cmd->add_option("--rho", imp.rho, "ADMM penalty");
  imp_cmd->add_option("--seed", imp.seed, "Random seed");
  imp_cmd->add_option("--threads", imp.threads, "Worker threads");
  imp_cmd->add_option("--missing-token", imp.missing_token, "Missing-cell token");
  imp_cmd->set_config("--config");

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against ground truth");
  eval_cmd->add_option("--pred", eval.pred, "Prediction CSV")->required();
  eval_cmd->add_option("--truth", eval.truth, "Ground-truth CSV")->required();
  eval_cmd->add_option("--column", eval.column, "Column to compare")->required();
  eval_cmd->add_option("--metric", eval.metric, "nrmse or accuracy")
      ->check(CLI::IsMember({"nrmse", "accuracy"}));
  eval_cmd->add_option("--jsonl", eval.jsonl, "Append the plot-ready JSON line here");
  eval_cmd->add_option("--label", eval.label, "Tag for the JSON line");
  eval_cmd->add_option("--missing-token", eval.missing_token, "Missing-cell token");
  eval_cmd->set_config("--config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) return cmd_generate_missing(gen);
    if (est_cmd->parsed()) return cmd_estimate_moments(est);
    if (reg_cmd->parsed()) return cmd_train_regression(reg);
    if (lda_cmd->parsed()) return cmd_train_lda(lda);
    if (pred_cmd->parsed()) return cmd_predict(pred);
    if (imp_cmd->parsed()) return cmd_impute(imp);
    if (eval_cmd->parsed()) return cmd_evaluate(eval);
  } catch (const std::exception& e) {
    return fail(e.what(), static_cast<int>(DRIM_ERR_INTERNAL));
  }
  return fail("no subcommand given");
}
