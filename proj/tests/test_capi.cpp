// Exercises the shared library strictly through the C header: handle
// lifecycles, status codes with thread-local messages, and numeric round
// trips across the boundary.
#include <drim.h>

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <string>
#include <vector>

namespace {

std::string tmp(const std::string& name) { return ::testing::TempDir() + name; }

struct DatasetHandle {
  drim_dataset* ptr = nullptr;
  ~DatasetHandle() { drim_dataset_free(ptr); }
};

// 12 dyadic rows with y = 2 x0 - x1 exactly.
DatasetHandle linear_dataset() {
  std::vector<double> values;
  const char* names[] = {"x0", "x1", "y"};
  for (int r = 0; r < 12; ++r) {
    const double x0 = 0.25 * r - 1.5;
    const double x1 = (r % 3) * 0.5 - 0.5;
    values.insert(values.end(), {x0, x1, 2.0 * x0 - x1});
  }
  DatasetHandle data;
  EXPECT_EQ(drim_dataset_from_arrays(values.data(), nullptr, 12, 3, names, &data.ptr),
            DRIM_OK);
  return data;
}

// Two Gaussian blobs around +/- (1.5, 1.5) with a trailing 0/1 label column.
DatasetHandle blobs_dataset(int n_per, std::vector<int>* labels_out) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> noise(0.0, 0.4);
  std::vector<double> values;
  const char* names[] = {"x0", "x1", "label"};
  for (int r = 0; r < 2 * n_per; ++r) {
    const double center = r < n_per ? -1.5 : 1.5;
    const int label = r < n_per ? 0 : 1;
    values.insert(values.end(),
                  {center + noise(gen), center + noise(gen), static_cast<double>(label)});
    if (labels_out) labels_out->push_back(label);
  }
  DatasetHandle data;
  EXPECT_EQ(drim_dataset_from_arrays(values.data(), nullptr, 2 * n_per, 3, names, &data.ptr),
            DRIM_OK);
  return data;
}

TEST(Capi, VersionAndErrorMessageLifecycle) {
  ASSERT_NE(drim_version(), nullptr);
  EXPECT_STREQ(drim_version(), "0.1.0");

  drim_dataset* data = nullptr;
  EXPECT_EQ(drim_dataset_load_csv("/no/such/file.csv", nullptr, &data),
            DRIM_ERR_IO);
  EXPECT_GT(std::strlen(drim_last_error()), 0u);

  const double one = 1.0;
  DatasetHandle ok;
  EXPECT_EQ(drim_dataset_from_arrays(&one, nullptr, 1, 1, nullptr, &ok.ptr), DRIM_OK);
  EXPECT_STREQ(drim_last_error(), "");
}

TEST(Capi, NullArgumentsAreRejectedNotCrashed) {
  EXPECT_EQ(drim_dataset_load_csv(nullptr, nullptr, nullptr), DRIM_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(drim_dataset_from_arrays(nullptr, nullptr, 1, 1, nullptr, nullptr),
            DRIM_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(drim_envelope_load(nullptr, nullptr), DRIM_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(drim_regression_load(nullptr, nullptr), DRIM_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(drim_lda_load(nullptr, nullptr), DRIM_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(drim_nrmse(nullptr, nullptr, 2, nullptr), DRIM_ERR_INVALID_ARGUMENT);
  EXPECT_STREQ(drim_last_error(), "null argument");

  drim_dataset_free(nullptr);
  drim_envelope_free(nullptr);
  drim_regression_free(nullptr);
  drim_lda_free(nullptr);
  EXPECT_EQ(drim_dataset_rows(nullptr), 0);
  EXPECT_EQ(drim_envelope_dim(nullptr), 0);
  EXPECT_EQ(drim_regression_dim(nullptr), 0);
  EXPECT_EQ(drim_lda_dim(nullptr), 0);
}

TEST(Capi, DatasetFromArraysRoundTripsThroughCopy) {
  const double values[] = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  const uint8_t mask[] = {1, 1, 0, 1, 1, 1};
  DatasetHandle data;
  ASSERT_EQ(drim_dataset_from_arrays(values, mask, 2, 3, nullptr, &data.ptr), DRIM_OK);

  EXPECT_EQ(drim_dataset_rows(data.ptr), 2);
  EXPECT_EQ(drim_dataset_cols(data.ptr), 3);
  double frac = -1.0;
  ASSERT_EQ(drim_dataset_missing_fraction(data.ptr, &frac), DRIM_OK);
  EXPECT_DOUBLE_EQ(frac, 1.0 / 6.0);

  EXPECT_STREQ(drim_dataset_column_name(data.ptr, 0), "x0");
  EXPECT_STREQ(drim_dataset_column_name(data.ptr, 2), "x2");
  EXPECT_EQ(drim_dataset_column_name(data.ptr, 3), nullptr);
  EXPECT_EQ(drim_dataset_column_index(data.ptr, "x1"), 1);
  EXPECT_EQ(drim_dataset_column_index(data.ptr, "nope"), -1);

  double got[6];
  uint8_t got_mask[6];
  ASSERT_EQ(drim_dataset_copy(data.ptr, got, got_mask), DRIM_OK);
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(got_mask[i], mask[i]);
    if (mask[i])
      EXPECT_EQ(got[i], values[i]);
    else
      EXPECT_TRUE(std::isnan(got[i]));
  }

  EXPECT_EQ(drim_dataset_from_arrays(values, nullptr, 0, 3, nullptr, &data.ptr),
            DRIM_ERR_INVALID_ARGUMENT);
}

TEST(Capi, CsvSaveLoadRoundTripsValuesAndMissingCells) {
  const double values[] = {1.5, 2.0, -0.25, 8.0};
  const uint8_t mask[] = {1, 0, 1, 1};
  const char* names[] = {"a", "b"};
  DatasetHandle data;
  ASSERT_EQ(drim_dataset_from_arrays(values, mask, 2, 2, names, &data.ptr), DRIM_OK);

  const std::string path = tmp("capi_roundtrip.csv");
  ASSERT_EQ(drim_dataset_save_csv(data.ptr, path.c_str()), DRIM_OK);

  DatasetHandle back;
  ASSERT_EQ(drim_dataset_load_csv(path.c_str(), nullptr, &back.ptr), DRIM_OK);
  EXPECT_EQ(drim_dataset_rows(back.ptr), 2);
  EXPECT_STREQ(drim_dataset_column_name(back.ptr, 1), "b");
  double got[4];
  uint8_t got_mask[4];
  ASSERT_EQ(drim_dataset_copy(back.ptr, got, got_mask), DRIM_OK);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(got_mask[i], mask[i]);
    if (mask[i]) EXPECT_EQ(got[i], values[i]);
  }
}

TEST(Capi, CsvParsingFailuresSurfaceAsParseErrors) {
  const std::string path = tmp("capi_bad.csv");
  {
    FILE* f = fopen(path.c_str(), "w");
    ASSERT_NE(f, nullptr);
    fputs("a,b\n1,zzz\n", f);
    fclose(f);
  }
  drim_dataset* data = nullptr;
  EXPECT_EQ(drim_dataset_load_csv(path.c_str(), nullptr, &data), DRIM_ERR_PARSE);
  EXPECT_NE(std::strstr(drim_last_error(), "zzz"), nullptr);

  // The same token parses fine once it is declared as the missing marker.
  DatasetHandle tolerant;
  ASSERT_EQ(drim_dataset_load_csv(path.c_str(), "zzz", &tolerant.ptr), DRIM_OK);
  double frac = 0.0;
  ASSERT_EQ(drim_dataset_missing_fraction(tolerant.ptr, &frac), DRIM_OK);
  EXPECT_DOUBLE_EQ(frac, 0.5);
}

TEST(Capi, MaskingOperatorsReturnNewHandlesAndKeepTheInputIntact) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> noise;
  std::vector<double> values(400);
  for (auto& v : values) v = noise(gen);
  DatasetHandle data;
  ASSERT_EQ(drim_dataset_from_arrays(values.data(), nullptr, 20, 20, nullptr, &data.ptr),
            DRIM_OK);

  DatasetHandle masked;
  ASSERT_EQ(drim_dataset_apply_mcar(data.ptr, 0.5, 9, &masked.ptr), DRIM_OK);
  double frac = 0.0;
  ASSERT_EQ(drim_dataset_missing_fraction(masked.ptr, &frac), DRIM_OK);
  EXPECT_GT(frac, 0.3);
  EXPECT_LT(frac, 0.7);
  ASSERT_EQ(drim_dataset_missing_fraction(data.ptr, &frac), DRIM_OK);
  EXPECT_DOUBLE_EQ(frac, 0.0);

  DatasetHandle censored;
  ASSERT_EQ(drim_dataset_apply_mnar(data.ptr, 1.0, -0.5, 10, &censored.ptr), DRIM_OK);
  ASSERT_EQ(drim_dataset_missing_fraction(censored.ptr, &frac), DRIM_OK);
  EXPECT_GT(frac, 0.0);
}

TEST(Capi, EnvelopeEstimateSaveLoad) {
  DatasetHandle data = linear_dataset();
  drim_envelope* env = nullptr;
  ASSERT_EQ(drim_envelope_estimate(data.ptr, "y", 10, 1.0, 4, 1, &env), DRIM_OK);
  EXPECT_EQ(drim_envelope_dim(env), 2);

  const std::string path = tmp("capi_envelope.json");
  ASSERT_EQ(drim_envelope_save(env, path.c_str(), "{\"k\": 10}"), DRIM_OK);
  EXPECT_EQ(drim_envelope_save(env, path.c_str(), "{oops"), DRIM_ERR_INVALID_ARGUMENT);

  drim_envelope* back = nullptr;
  ASSERT_EQ(drim_envelope_load(path.c_str(), &back), DRIM_OK);
  EXPECT_EQ(drim_envelope_dim(back), 2);
  drim_envelope_free(back);

  // Without a target the features keep all three columns.
  drim_envelope* full = nullptr;
  ASSERT_EQ(drim_envelope_estimate(data.ptr, nullptr, 10, 1.0, 4, 1, &full), DRIM_OK);
  EXPECT_EQ(drim_envelope_dim(full), 3);
  drim_envelope_free(full);

  EXPECT_EQ(drim_envelope_estimate(data.ptr, "nope", 10, 1.0, 4, 1, &env),
            DRIM_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(drim_envelope_estimate(data.ptr, "y", 1, 1.0, 4, 1, &env),
            DRIM_ERR_INVALID_ARGUMENT);
  drim_envelope_free(env);
}

TEST(Capi, TrainOptionsInitFillsTheDocumentedDefaults) {
  drim_train_options opts;
  drim_train_options_init(&opts);
  EXPECT_STREQ(opts.solver, "pga");
  EXPECT_DOUBLE_EQ(opts.lambda, 0.1);
  EXPECT_DOUBLE_EQ(opts.c, 2.0);
  EXPECT_EQ(opts.k, 30);
  EXPECT_DOUBLE_EQ(opts.rho, 1.0);
  EXPECT_EQ(opts.max_iters, 0);
  EXPECT_DOUBLE_EQ(opts.tol, 0.0);
  EXPECT_EQ(opts.seed, 0u);
  EXPECT_EQ(opts.threads, 1);
  drim_train_options_init(nullptr);  // tolerated
}

TEST(Capi, ZeroRadiusTrainingRecoversAnExactLinearRule) {
  DatasetHandle data = linear_dataset();
  drim_train_options opts;
  drim_train_options_init(&opts);
  opts.c = 0.0;
  opts.lambda = 1e-8;
  opts.tol = 1e-12;

  drim_regression* model = nullptr;
  ASSERT_EQ(drim_train_regression(data.ptr, "y", &opts, nullptr, &model), DRIM_OK);
  EXPECT_EQ(drim_last_train_converged(), 1);
  EXPECT_EQ(drim_regression_dim(model), 2);
  EXPECT_STREQ(drim_regression_target_name(model), "y");

  double theta[2];
  ASSERT_EQ(drim_regression_coefficients(model, theta), DRIM_OK);
  EXPECT_NEAR(theta[0], 2.0, 1e-4);
  EXPECT_NEAR(theta[1], -1.0, 1e-4);

  double pred[12], truth[12];
  ASSERT_EQ(drim_regression_predict(model, data.ptr, pred), DRIM_OK);
  for (int r = 0; r < 12; ++r) {
    const double x0 = 0.25 * r - 1.5;
    const double x1 = (r % 3) * 0.5 - 0.5;
    truth[r] = 2.0 * x0 - x1;
    EXPECT_NEAR(pred[r], truth[r], 1e-3);
  }
  double score = 1.0;
  ASSERT_EQ(drim_nrmse(truth, pred, 12, &score), DRIM_OK);
  EXPECT_LT(score, 1e-3);

  opts.solver = "sgd";
  EXPECT_EQ(drim_train_regression(data.ptr, "y", &opts, nullptr, &model),
            DRIM_ERR_INVALID_ARGUMENT);
  drim_regression_free(model);
}

TEST(Capi, ConvergenceFlagFollowsTheStoppingRule) {
  DatasetHandle data = linear_dataset();
  drim_train_options opts;
  drim_train_options_init(&opts);
  opts.tol = 1e-14;
  opts.max_iters = 1;

  drim_regression* model = nullptr;
  ASSERT_EQ(drim_train_regression(data.ptr, "y", &opts, nullptr, &model), DRIM_OK);
  EXPECT_EQ(drim_last_train_converged(), 0);
  drim_regression_free(model);
}

TEST(Capi, RegressionModelsRoundTripThroughJson) {
  DatasetHandle data = linear_dataset();
  drim_train_options opts;
  drim_train_options_init(&opts);
  opts.c = 0.0;
  opts.lambda = 1e-6;

  drim_regression* model = nullptr;
  ASSERT_EQ(drim_train_regression(data.ptr, "y", &opts, nullptr, &model), DRIM_OK);
  const std::string path = tmp("capi_regression.json");
  ASSERT_EQ(drim_regression_save(model, path.c_str(), "{\"c\": 0.0}"), DRIM_OK);

  drim_regression* back = nullptr;
  ASSERT_EQ(drim_regression_load(path.c_str(), &back), DRIM_OK);
  double a[2], b[2];
  ASSERT_EQ(drim_regression_coefficients(model, a), DRIM_OK);
  ASSERT_EQ(drim_regression_coefficients(back, b), DRIM_OK);
  EXPECT_EQ(a[0], b[0]);
  EXPECT_EQ(a[1], b[1]);

  char type[32];
  ASSERT_EQ(drim_model_type(path.c_str(), type, sizeof type), DRIM_OK);
  EXPECT_STREQ(type, "regression_model");
  EXPECT_EQ(drim_model_type(path.c_str(), type, 4), DRIM_ERR_INVALID_ARGUMENT);

  drim_regression_free(model);
  drim_regression_free(back);

  drim_regression* bad = nullptr;
  EXPECT_EQ(drim_regression_load("/no/such/model.json", &bad), DRIM_ERR_IO);
}

TEST(Capi, PredictAlignsFeatureColumnsByName) {
  DatasetHandle data = linear_dataset();
  drim_train_options opts;
  drim_train_options_init(&opts);
  opts.c = 0.0;
  opts.lambda = 1e-6;
  drim_regression* model = nullptr;
  ASSERT_EQ(drim_train_regression(data.ptr, "y", &opts, nullptr, &model), DRIM_OK);

  // Same rows with the columns permuted and an extra one thrown in.
  std::vector<double> shuffled;
  const char* names[] = {"junk", "x1", "x0"};
  for (int r = 0; r < 12; ++r) {
    const double x0 = 0.25 * r - 1.5;
    const double x1 = (r % 3) * 0.5 - 0.5;
    shuffled.insert(shuffled.end(), {99.0, x1, x0});
  }
  DatasetHandle permuted;
  ASSERT_EQ(drim_dataset_from_arrays(shuffled.data(), nullptr, 12, 3, names, &permuted.ptr),
            DRIM_OK);

  double direct[12], renamed[12];
  ASSERT_EQ(drim_regression_predict(model, data.ptr, direct), DRIM_OK);
  ASSERT_EQ(drim_regression_predict(model, permuted.ptr, renamed), DRIM_OK);
  for (int r = 0; r < 12; ++r) EXPECT_EQ(direct[r], renamed[r]);

  const char* missing[] = {"x0", "zz", "y"};
  DatasetHandle wrong;
  ASSERT_EQ(drim_dataset_from_arrays(shuffled.data(), nullptr, 12, 3, missing, &wrong.ptr),
            DRIM_OK);
  EXPECT_EQ(drim_regression_predict(model, wrong.ptr, direct), DRIM_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::strstr(drim_last_error(), "x1"), nullptr);
  drim_regression_free(model);
}

TEST(Capi, ImputeFillsEveryMissingCellAndPreservesCompleteData) {
  const double values[] = {1.0, 2.0,  2.0, 4.0,  3.0, 6.0,
                           4.0, 8.0,  5.0, 10.0, 6.0, 12.0};
  const uint8_t mask[] = {1, 1, 1, 1, 1, 0, 1, 1, 0, 1, 1, 1};
  DatasetHandle data;
  ASSERT_EQ(drim_dataset_from_arrays(values, mask, 6, 2, nullptr, &data.ptr), DRIM_OK);

  drim_train_options opts;
  drim_train_options_init(&opts);
  opts.c = 0.0;
  opts.lambda = 1e-6;
  opts.k = 3;

  drim_dataset* filled = nullptr;
  ASSERT_EQ(drim_impute(data.ptr, &opts, &filled), DRIM_OK);
  double frac = 1.0;
  ASSERT_EQ(drim_dataset_missing_fraction(filled, &frac), DRIM_OK);
  EXPECT_DOUBLE_EQ(frac, 0.0);
  ASSERT_EQ(drim_dataset_missing_fraction(data.ptr, &frac), DRIM_OK);
  EXPECT_GT(frac, 0.0);

  double got[12];
  ASSERT_EQ(drim_dataset_copy(filled, got, nullptr), DRIM_OK);
  for (int i = 0; i < 12; ++i)
    if (mask[i]) EXPECT_EQ(got[i], values[i]);
  drim_dataset_free(filled);
}

TEST(Capi, LdaOptionsInitFillsTheDocumentedDefaults) {
  drim_lda_options opts;
  drim_lda_options_init(&opts);
  EXPECT_EQ(opts.k, 5);
  EXPECT_EQ(opts.iters, 100);
  EXPECT_DOUBLE_EQ(opts.alpha, 0.05);
  EXPECT_EQ(opts.n_mc, 512);
  EXPECT_DOUBLE_EQ(opts.delta_scale, 0.1);
  EXPECT_DOUBLE_EQ(opts.mu_c, 2.0);
  EXPECT_EQ(opts.em_rounds, 5);
  EXPECT_EQ(opts.seed, 0u);
  drim_lda_options_init(nullptr);
}

TEST(Capi, LdaTrainsClassifiesAndRoundTrips) {
  std::vector<int> truth;
  DatasetHandle data = blobs_dataset(40, &truth);

  drim_lda_options opts;
  drim_lda_options_init(&opts);
  opts.k = 2;
  opts.iters = 40;
  opts.alpha = 0.1;
  opts.n_mc = 128;
  opts.mu_c = 1.0;
  opts.seed = 11;

  drim_lda* model = nullptr;
  ASSERT_EQ(drim_train_lda(data.ptr, "label", &opts, &model), DRIM_OK);
  EXPECT_EQ(drim_lda_dim(model), 2);
  EXPECT_STREQ(drim_lda_label_name(model), "label");

  std::vector<int32_t> labels(truth.size());
  ASSERT_EQ(drim_lda_classify(model, data.ptr, labels.data()), DRIM_OK);
  std::vector<double> got(truth.size()), want(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    got[i] = labels[i];
    want[i] = truth[i];
  }
  double acc = 0.0;
  ASSERT_EQ(drim_accuracy(want.data(), got.data(), static_cast<int64_t>(truth.size()), &acc),
            DRIM_OK);
  EXPECT_GE(acc, 0.9);

  const std::string path = tmp("capi_lda.json");
  ASSERT_EQ(drim_lda_save(model, path.c_str(), nullptr), DRIM_OK);
  char type[32];
  ASSERT_EQ(drim_model_type(path.c_str(), type, sizeof type), DRIM_OK);
  EXPECT_STREQ(type, "lda_model");

  drim_lda* back = nullptr;
  ASSERT_EQ(drim_lda_load(path.c_str(), &back), DRIM_OK);
  EXPECT_STREQ(drim_lda_label_name(back), "label");
  std::vector<int32_t> again(truth.size());
  ASSERT_EQ(drim_lda_classify(back, data.ptr, again.data()), DRIM_OK);
  EXPECT_EQ(labels, again);
  drim_lda_free(back);
  drim_lda_free(model);
}

TEST(Capi, LdaTrainsThroughEmWhenLabelsAreMasked) {
  std::vector<int> truth;
  std::vector<double> values;
  std::vector<uint8_t> mask;
  {
    std::mt19937_64 gen(17);
    std::normal_distribution<double> noise(0.0, 0.4);
    for (int r = 0; r < 60; ++r) {
      const double center = r < 30 ? -1.5 : 1.5;
      truth.push_back(r < 30 ? 0 : 1);
      values.insert(values.end(),
                    {center + noise(gen), center + noise(gen),
                     static_cast<double>(truth.back())});
      const bool hide = r % 5 < 2;
      mask.insert(mask.end(), {1, 1, static_cast<uint8_t>(hide ? 0 : 1)});
    }
  }
  const char* names[] = {"x0", "x1", "label"};
  DatasetHandle data;
  ASSERT_EQ(drim_dataset_from_arrays(values.data(), mask.data(), 60, 3, names, &data.ptr),
            DRIM_OK);

  drim_lda_options opts;
  drim_lda_options_init(&opts);
  opts.k = 2;
  opts.iters = 30;
  opts.n_mc = 128;
  opts.alpha = 0.1;
  opts.mu_c = 1.0;
  opts.em_rounds = 2;
  opts.seed = 19;

  drim_lda* model = nullptr;
  ASSERT_EQ(drim_train_lda(data.ptr, "label", &opts, &model), DRIM_OK);
  std::vector<int32_t> labels(60);
  ASSERT_EQ(drim_lda_classify(model, data.ptr, labels.data()), DRIM_OK);
  int hits = 0;
  for (int i = 0; i < 60; ++i)
    if (labels[i] == truth[static_cast<std::size_t>(i)]) ++hits;
  EXPECT_GE(hits, 54);
  drim_lda_free(model);

  // A label outside {0, 1} on an observed row is rejected with the offending
  // row in the message (row 3 is the first one whose label is not hidden).
  values[2 * 3 + 2] = 0.5;
  DatasetHandle bad;
  ASSERT_EQ(drim_dataset_from_arrays(values.data(), mask.data(), 60, 3, names, &bad.ptr),
            DRIM_OK);
  EXPECT_EQ(drim_train_lda(bad.ptr, "label", &opts, &model), DRIM_ERR_INVALID_ARGUMENT);
  EXPECT_NE(std::strstr(drim_last_error(), "row 3"), nullptr);
}

TEST(Capi, MetricsMatchHandValues) {
  const double truth[] = {0.0, 1.0, 2.0, 3.0};
  const double pred[] = {0.0, 1.0, 2.0, 5.0};
  double score = 0.0;
  ASSERT_EQ(drim_nrmse(truth, pred, 4, &score), DRIM_OK);
  EXPECT_NEAR(score, 1.0 / std::sqrt(1.25), 1e-12);
  ASSERT_EQ(drim_nrmse(truth, truth, 4, &score), DRIM_OK);
  EXPECT_DOUBLE_EQ(score, 0.0);

  const double flat[] = {2.0, 2.0, 2.0, 2.0};
  EXPECT_EQ(drim_nrmse(flat, pred, 4, &score), DRIM_ERR_NUMERIC);

  const double labels[] = {0.0, 1.0, 1.0, 0.0};
  const double rounded[] = {0.4, 0.6, 0.9, 0.9};
  ASSERT_EQ(drim_accuracy(labels, rounded, 4, &score), DRIM_OK);
  EXPECT_DOUBLE_EQ(score, 0.75);
  EXPECT_EQ(drim_accuracy(labels, rounded, 0, &score), DRIM_ERR_INVALID_ARGUMENT);
}

}  // namespace
