/* lrsense — low-rank matrix sensing laboratory.
 *
 * C interface to the core library: measurement ensembles, trace-regression
 * datasets, the ADMM solver for the nuclear-norm penalized program, isometry
 * and noise probes, subspace packings, and the benchmark experiment driver.
 *
 * Conventions: every function returns an lrsense error code; outputs are
 * written through pointers. Objects are opaque handles released with the
 * matching _destroy function. lrsense_last_error() describes the most recent
 * failure on the calling thread.
 */
#ifndef LRSENSE_H
#define LRSENSE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LRSENSE_API __declspec(dllexport)
#else
#define LRSENSE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
  LRSENSE_OK = 0,
  LRSENSE_ERR_ARGUMENT = 1,  /* null pointers, bad buffer sizes */
  LRSENSE_ERR_DIMENSION = 2, /* shape mismatches */
  LRSENSE_ERR_DOMAIN = 3,    /* values outside the mathematical domain */
  LRSENSE_ERR_CONFIG = 4,    /* experiment configuration problems */
  LRSENSE_ERR_IO = 5,        /* file problems */
  LRSENSE_ERR_RUNTIME = 6    /* anything else */
};

enum { LRSENSE_ENSEMBLE_GAUSSIAN = 0, LRSENSE_ENSEMBLE_RADEMACHER = 1 };
enum { LRSENSE_NOISE_GAUSSIAN = 0, LRSENSE_NOISE_RADEMACHER_SCALED = 1 };
enum { LRSENSE_LAMBDA_THEOREM = 0, LRSENSE_LAMBDA_EXPERIMENT = 1 };

typedef struct lrsense_matrix lrsense_matrix;
typedef struct lrsense_dataset lrsense_dataset;
typedef struct lrsense_solve_result lrsense_solve_result;

LRSENSE_API const char* lrsense_version(void);
LRSENSE_API const char* lrsense_error_name(int code);
/* Message for the most recent failure on this thread; empty if none. */
LRSENSE_API const char* lrsense_last_error(void);

/* ---- matrices (row-major doubles) ---- */
LRSENSE_API int lrsense_matrix_create(int64_t rows, int64_t cols,
                                      const double* row_major, lrsense_matrix** out);
LRSENSE_API void lrsense_matrix_destroy(lrsense_matrix* m);
LRSENSE_API int lrsense_matrix_rows(const lrsense_matrix* m, int64_t* rows);
LRSENSE_API int lrsense_matrix_cols(const lrsense_matrix* m, int64_t* cols);
/* buf_len must be rows*cols. */
LRSENSE_API int lrsense_matrix_data(const lrsense_matrix* m, double* buf, size_t buf_len);
/* Binary matrix container (square matrices). */
LRSENSE_API int lrsense_matrix_load(const char* path, lrsense_matrix** out);
LRSENSE_API int lrsense_matrix_save(const lrsense_matrix* m, const char* path);

/* ---- datasets ---- */
/* Rank-r ground truth (product of Gaussian factors), an ensemble of n
 * measurements, and noisy responses, all derived deterministically from
 * seed. */
LRSENSE_API int lrsense_dataset_generate(int ensemble_kind, int64_t m, int64_t r,
                                         int64_t n, double sigma_xi, int noise_kind,
                                         uint64_t seed, lrsense_dataset** out);
LRSENSE_API int lrsense_dataset_load(const char* path, lrsense_dataset** out);
LRSENSE_API int lrsense_dataset_save(const lrsense_dataset* ds, const char* path);
LRSENSE_API void lrsense_dataset_destroy(lrsense_dataset* ds);
LRSENSE_API int lrsense_dataset_dims(const lrsense_dataset* ds, int64_t* m, int64_t* n);
LRSENSE_API int lrsense_dataset_ground_truth(const lrsense_dataset* ds,
                                             lrsense_matrix** out);

/* ---- regularization rule ---- */
/* theorem: C2*sigma*sqrt(m*n*ln m); experiment: 7*sigma*sqrt(m*n). */
LRSENSE_API int lrsense_lambda_rule(int64_t m, int64_t n, double sigma_xi, int variant,
                                    double C2, double* out);

/* ---- solver ---- */
typedef struct {
  double lambda;             /* >= 0 */
  double rho;                /* <= 0 selects the default (n) */
  int64_t max_iterations;    /* <= 0 selects 500 */
  double tolerance;          /* <= 0 selects 1e-10 * m^2 */
  double cg_tolerance;       /* <= 0 selects 1e-8 */
  int64_t cg_max_iterations; /* <= 0 selects 400 */
  uint64_t init_seed;
} lrsense_admm_options;

LRSENSE_API int lrsense_admm_solve(const lrsense_dataset* ds,
                                   const lrsense_admm_options* options,
                                   lrsense_solve_result** out);
LRSENSE_API void lrsense_solve_result_destroy(lrsense_solve_result* r);
LRSENSE_API int lrsense_solve_result_converged(const lrsense_solve_result* r, int* out);
LRSENSE_API int lrsense_solve_result_iterations(const lrsense_solve_result* r,
                                                int64_t* out);
LRSENSE_API int lrsense_solve_result_estimate(const lrsense_solve_result* r,
                                              lrsense_matrix** out);
LRSENSE_API int lrsense_solve_result_write_json(const lrsense_solve_result* r,
                                                const char* path);
/* Spectral / Frobenius / nuclear norms of estimate - ground truth. Any output
 * pointer may be null. */
LRSENSE_API int lrsense_estimate_errors(const lrsense_solve_result* r,
                                        const lrsense_dataset* ds, double* spectral,
                                        double* frobenius, double* nuclear);

/* ---- probes ---- */
/* Lower-bound estimate of the rank-r isometry constant of a freshly drawn
 * ensemble. */
LRSENSE_API int lrsense_rip_probe(int ensemble_kind, int64_t m, int64_t n, int64_t r,
                                  int64_t n_samples, int64_t ascent_steps, uint64_t seed,
                                  double* delta_hat);
/* values must hold trials entries: per-trial ||(1/n) sum_j xi_j X_j||_inf. */
LRSENSE_API int lrsense_noise_probe(int ensemble_kind, int64_t m, int64_t n,
                                    double sigma_xi, int64_t trials, uint64_t seed,
                                    double* values);

/* ---- packings and hard instances ---- */
/* q_infinite != 0 selects the spectral-norm metric; q is ignored then. */
LRSENSE_API int lrsense_packing_build(int64_t m, int64_t k, double q, int q_infinite,
                                      double epsilon, int64_t max_cardinality,
                                      int64_t max_attempts, uint64_t seed,
                                      int64_t* cardinality, double* min_pairwise,
                                      int64_t* attempts);

typedef struct {
  double kappa;
  int64_t cardinality;
  double max_pairwise_kl;
  double log_cardinality;
  int kl_condition_met;
  double min_pairwise_distance;
} lrsense_minimax_summary;

/* json_path and matrices_path are optional (pass NULL to skip). */
LRSENSE_API int lrsense_minimax_build(int64_t m, int64_t r, int64_t n, double sigma_xi,
                                      double c_prime, double q, int q_infinite,
                                      uint64_t seed, const char* json_path,
                                      const char* matrices_path,
                                      lrsense_minimax_summary* out);

/* ---- experiment driver ---- */
/* Runs the seeded (m, r, trial) grid described by the JSON config file and
 * writes trials.csv plus plot series into the configured output directory. */
LRSENSE_API int lrsense_experiment_run(const char* config_path);

#ifdef __cplusplus
}
#endif

#endif /* LRSENSE_H */
