/* C interface to the gb2ss engine. All functions return a gb2ss_status;
 * on failure gb2ss_last_error() describes the problem for the calling
 * thread. Handles are opaque and owned by the caller. */
#ifndef GB2SS_GB2SS_H_
#define GB2SS_GB2SS_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GB2SS_API __declspec(dllexport)
#else
#define GB2SS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gb2ss_status {
  GB2SS_OK = 0,
  GB2SS_E_ARGUMENT = 1,    /* null handle or invalid argument */
  GB2SS_E_DATA = 2,        /* malformed input, configuration or dimension mismatch */
  GB2SS_E_IO = 3,          /* file could not be read or written */
  GB2SS_E_DOMAIN = 4,      /* parameter outside the domain of a function */
  GB2SS_E_NUMERICAL = 5,   /* sampler failure or non-positive-definite matrix */
  GB2SS_E_INTERNAL = 6
} gb2ss_status;

typedef struct gb2ss_dataset gb2ss_dataset;
typedef struct gb2ss_covariates gb2ss_covariates;
typedef struct gb2ss_config gb2ss_config;
typedef struct gb2ss_chain gb2ss_chain;

/* Called every 1000 sweeps (once at the end for independent fits) with the
 * overall acceptance rate so far. */
typedef void (*gb2ss_progress_fn)(uint64_t iteration, uint64_t total,
                                  double acceptance_rate, void* user);

GB2SS_API const char* gb2ss_version(void);
GB2SS_API const char* gb2ss_last_error(void);
GB2SS_API const char* gb2ss_status_name(gb2ss_status status);

/* GB2(a, b, p, q) scalar functions. */
GB2SS_API gb2ss_status gb2ss_gb2_pdf(double a, double b, double p, double q,
                                     double x, double* out);
GB2SS_API gb2ss_status gb2ss_gb2_cdf(double a, double b, double p, double q,
                                     double x, double* out);
GB2SS_API gb2ss_status gb2ss_gb2_quantile(double a, double b, double p, double q,
                                          double u, double* out);
GB2SS_API gb2ss_status gb2ss_gb2_gini(double a, double b, double p, double q,
                                      double* out);
GB2SS_API gb2ss_status gb2ss_reg_inc_beta(double z, double p, double q, double* out);

/* Dataset JSON. */
GB2SS_API gb2ss_status gb2ss_dataset_load(const char* path, gb2ss_dataset** out);
GB2SS_API gb2ss_status gb2ss_dataset_save(const gb2ss_dataset* data, const char* path);
GB2SS_API size_t gb2ss_dataset_periods(const gb2ss_dataset* data);
GB2SS_API void gb2ss_dataset_free(gb2ss_dataset* data);

/* Covariate CSV; log_diff != 0 applies the first difference of the log. */
GB2SS_API gb2ss_status gb2ss_covariates_load(const char* path, int log_diff,
                                             gb2ss_covariates** out);
GB2SS_API size_t gb2ss_covariates_dim(const gb2ss_covariates* covs);
GB2SS_API void gb2ss_covariates_free(gb2ss_covariates* covs);

/* Run configuration. path == NULL gives the defaults. */
GB2SS_API gb2ss_status gb2ss_config_load(const char* path, gb2ss_config** out);
GB2SS_API gb2ss_status gb2ss_config_set_seed(gb2ss_config* cfg, uint64_t seed);
GB2SS_API gb2ss_status gb2ss_config_set_threads(gb2ss_config* cfg, unsigned threads);
GB2SS_API unsigned gb2ss_config_threads(const gb2ss_config* cfg);
/* Resolved configuration as JSON; the string lives until the next call on
 * this handle. */
GB2SS_API const char* gb2ss_config_json(gb2ss_config* cfg);
GB2SS_API void gb2ss_config_free(gb2ss_config* cfg);

/* Samplers. progress may be NULL. */
GB2SS_API gb2ss_status gb2ss_fit_dynamic(const gb2ss_dataset* data,
                                         const gb2ss_covariates* covs,
                                         const gb2ss_config* cfg,
                                         gb2ss_progress_fn progress, void* user,
                                         gb2ss_chain** out);
GB2SS_API gb2ss_status gb2ss_fit_independent(const gb2ss_dataset* data,
                                             const gb2ss_config* cfg,
                                             gb2ss_progress_fn progress, void* user,
                                             gb2ss_chain** out);

/* Chain file plus `path`.json sidecar. */
GB2SS_API gb2ss_status gb2ss_chain_save(const gb2ss_chain* chain, const char* path);
GB2SS_API gb2ss_status gb2ss_chain_load(const char* path, gb2ss_chain** out);
GB2SS_API size_t gb2ss_chain_draws(const gb2ss_chain* chain);
GB2SS_API size_t gb2ss_chain_periods(const gb2ss_chain* chain);
GB2SS_API double gb2ss_chain_acceptance(const gb2ss_chain* chain);
GB2SS_API double gb2ss_chain_wall_seconds(const gb2ss_chain* chain);
/* Acceptance statistics as JSON; valid until the next call on this handle. */
GB2SS_API const char* gb2ss_chain_acceptance_json(gb2ss_chain* chain);
GB2SS_API void gb2ss_chain_free(gb2ss_chain* chain);

/* selector: "gb2-params", "coefficients", "mu" or "gini". */
GB2SS_API gb2ss_status gb2ss_summarize_write(const gb2ss_chain* chain,
                                             const char* selector,
                                             const char* csv_path, unsigned threads);
/* points >= 2; upper <= 0 selects the default upper end. */
GB2SS_API gb2ss_status gb2ss_density_grid_write(const gb2ss_chain* chain, int points,
                                                double upper, const char* csv_path,
                                                unsigned threads);
/* Zeroes covariate `index` (1-based). Writes the actual, counterfactual and
 * paired-difference Gini summaries. */
GB2SS_API gb2ss_status gb2ss_counterfactual_write(const gb2ss_chain* chain,
                                                  const gb2ss_covariates* covs,
                                                  int index, const char* actual_path,
                                                  const char* counterfactual_path,
                                                  const char* difference_path,
                                                  unsigned threads);

/* spec_path == NULL runs the default comparative-statics sweep. */
GB2SS_API gb2ss_status gb2ss_sweep_write(const char* spec_path, const char* table_path,
                                         const char* pdf_path);

/* spec_path == NULL uses the default synthetic design. seed_override is
 * applied when has_seed != 0. covariates_path is written only for
 * model-based specs and may be NULL; *covariates_written (optional) reports
 * whether it was. */
GB2SS_API gb2ss_status gb2ss_simulate(const char* spec_path, int has_seed,
                                      uint64_t seed_override,
                                      const char* dataset_path,
                                      const char* truth_path,
                                      const char* covariates_path,
                                      int* covariates_written);

/* Lowercase hex SHA-256 into out (at least 65 bytes). */
GB2SS_API gb2ss_status gb2ss_file_sha256(const char* path, char* out, size_t out_size);

#ifdef __cplusplus
}
#endif

#endif /* GB2SS_GB2SS_H_ */
