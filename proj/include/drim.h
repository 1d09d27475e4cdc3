/* drim: distributionally robust inference on data with missing values.
 *
 * C interface over the core library. All functions that can fail return a
 * drim_status; on failure the thread-local message from drim_last_error()
 * describes what went wrong. Handles are opaque and must be released with
 * their matching *_free function. Matrices cross the boundary as row-major
 * double arrays with an optional parallel 0/1 availability mask.
 */
#ifndef DRIM_H
#define DRIM_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum drim_status {
  DRIM_OK = 0,
  DRIM_ERR_INVALID_ARGUMENT = 1,
  DRIM_ERR_IO = 2,
  DRIM_ERR_PARSE = 3,
  DRIM_ERR_NUMERIC = 4,
  DRIM_ERR_UNAVAILABLE = 5,
  DRIM_ERR_DIVERGED = 6,
  DRIM_ERR_INTERNAL = 7
} drim_status;

/* Library version as "major.minor.patch". */
const char* drim_version(void);

/* Message for the most recent failure on this thread; empty string if none. */
const char* drim_last_error(void);

typedef struct drim_dataset drim_dataset;
typedef struct drim_envelope drim_envelope;
typedef struct drim_regression drim_regression;
typedef struct drim_lda drim_lda;

/* ---- datasets -------------------------------------------------------- */

/* CSV with a header row; a cell is missing when empty or equal to
 * missing_token (NULL means "NA"). */
drim_status drim_dataset_load_csv(const char* path, const char* missing_token,
                                  drim_dataset** out);
drim_status drim_dataset_save_csv(const drim_dataset* data, const char* path);

/* values: rows*cols row-major. mask: same layout, nonzero = available; NULL
 * means fully observed. column_names: cols entries; NULL means x0..x{d-1}. */
drim_status drim_dataset_from_arrays(const double* values, const uint8_t* mask,
                                     int64_t rows, int64_t cols,
                                     const char* const* column_names, drim_dataset** out);
void drim_dataset_free(drim_dataset* data);

int64_t drim_dataset_rows(const drim_dataset* data);
int64_t drim_dataset_cols(const drim_dataset* data);
drim_status drim_dataset_missing_fraction(const drim_dataset* data, double* out);

/* Pointer owned by the dataset; NULL when j is out of range. */
const char* drim_dataset_column_name(const drim_dataset* data, int64_t j);
/* -1 when the name is absent. */
int64_t drim_dataset_column_index(const drim_dataset* data, const char* name);

/* Copies into caller buffers of rows*cols entries; either may be NULL to
 * skip. Missing cells copy as NaN values with mask 0. */
drim_status drim_dataset_copy(const drim_dataset* data, double* values, uint8_t* mask);

/* New dataset with extra cells masked out; the input is untouched. */
drim_status drim_dataset_apply_mcar(const drim_dataset* data, double p, uint64_t seed,
                                    drim_dataset** out);
/* Self-censoring per column: each cell is masked with probability
 * Phi(a|z| + b) of its standardized value. */
drim_status drim_dataset_apply_mnar(const drim_dataset* data, double a, double b,
                                    uint64_t seed, drim_dataset** out);

/* ---- moment envelopes ------------------------------------------------ */

/* Pairwise point estimates with bootstrap confidence radii scaled by c, from
 * k resamples. target_column may be NULL for a feature-only envelope. */
drim_status drim_envelope_estimate(const drim_dataset* data, const char* target_column,
                                   int k, double c, uint64_t seed, int threads,
                                   drim_envelope** out);
/* config_json, when non-NULL, must be a JSON object; it is embedded verbatim
 * under "config" for provenance. */
drim_status drim_envelope_save(const drim_envelope* env, const char* path,
                               const char* config_json);
drim_status drim_envelope_load(const char* path, drim_envelope** out);
void drim_envelope_free(drim_envelope* env);
int64_t drim_envelope_dim(const drim_envelope* env);

/* ---- robust regression ----------------------------------------------- */

typedef struct drim_train_options {
  const char* solver;    /* "pga", "nesterov", or "admm" */
  double lambda;         /* ridge weight, > 0 */
  double c;              /* envelope radius multiplier, >= 0 */
  int k;                 /* bootstrap resamples */
  double rho;            /* admm penalty, > 0 */
  int64_t max_iters;     /* 0 = solver default */
  double tol;            /* 0 = solver default */
  uint64_t seed;
  int threads;
} drim_train_options;

/* Fills the documented defaults: pga, lambda 0.1, c 2, k 30, rho 1. */
void drim_train_options_init(drim_train_options* opts);

/* Builds the envelope from data and solves the min-max problem. trace_path,
 * when non-NULL, receives the per-iteration objective (and residual for
 * admm) as JSON lines; on divergence the partial trace is still written. */
drim_status drim_train_regression(const drim_dataset* data, const char* target_column,
                                  const drim_train_options* opts, const char* trace_path,
                                  drim_regression** out);
drim_status drim_train_regression_from_envelope(const drim_envelope* env,
                                                const drim_train_options* opts,
                                                const char* trace_path,
                                                drim_regression** out);

/* Nonzero iff the last train call on this thread certified its stopping rule
 * (reached tolerance rather than the iteration cap). */
int drim_last_train_converged(void);

drim_status drim_regression_save(const drim_regression* model, const char* path,
                                 const char* config_json);
drim_status drim_regression_load(const char* path, drim_regression** out);
void drim_regression_free(drim_regression* model);

int64_t drim_regression_dim(const drim_regression* model);
/* Pointers owned by the model. */
const char* drim_regression_target_name(const drim_regression* model);
drim_status drim_regression_coefficients(const drim_regression* model, double* out);

/* Predicts one value per row of features, matching columns to the model's
 * feature names (extra columns are ignored; a missing one is an error).
 * Missing cells are handled by re-solving on the available coordinates. */
drim_status drim_regression_predict(const drim_regression* model,
                                    const drim_dataset* features, double* out);

/* Fills every missing cell from a robust regression of its column on all
 * others; returns a complete dataset. */
drim_status drim_impute(const drim_dataset* data, const drim_train_options* opts,
                        drim_dataset** out);

/* ---- robust discriminant analysis ------------------------------------ */

typedef struct drim_lda_options {
  int k;               /* covariance candidates per class */
  int iters;           /* gradient iterations per inner solve */
  double alpha;        /* step size */
  int n_mc;            /* Monte-Carlo draws per loss evaluation */
  double delta_scale;  /* simplex regularization, relative to max loss */
  double mu_c;         /* mean-box radius multiplier */
  int em_rounds;       /* outer rounds when labels are missing */
  uint64_t seed;
} drim_lda_options;

/* Fills the documented defaults: k 5, iters 100, alpha 0.05, n_mc 512. */
void drim_lda_options_init(drim_lda_options* opts);

/* label_column must hold 0/1 values; rows with a missing label are assigned
 * by EM rounds. The remaining columns are the features. */
drim_status drim_train_lda(const drim_dataset* data, const char* label_column,
                           const drim_lda_options* opts, drim_lda** out);

drim_status drim_lda_save(const drim_lda* model, const char* path,
                          const char* config_json);
drim_status drim_lda_load(const char* path, drim_lda** out);
void drim_lda_free(drim_lda* model);

int64_t drim_lda_dim(const drim_lda* model);
const char* drim_lda_label_name(const drim_lda* model);

/* 0/1 label per row; missing cells contribute zero to the score. */
drim_status drim_lda_classify(const drim_lda* model, const drim_dataset* features,
                              int32_t* out);

/* ---- evaluation ------------------------------------------------------- */

/* "regression_model", "lda_model", or "moment_envelope" into buf. */
drim_status drim_model_type(const char* path, char* buf, int64_t cap);

/* RMSE over the mean predictor's RMSE; needs n >= 2 and non-constant truth. */
drim_status drim_nrmse(const double* y_true, const double* y_pred, int64_t n, double* out);

/* Fraction of equal rounded labels. */
drim_status drim_accuracy(const double* y_true, const double* y_pred, int64_t n, double* out);

#ifdef __cplusplus
}
#endif

#endif /* DRIM_H */
