/* resamphd: resampling-based confidence regions and FWER-controlled
 * multiple testing for high-dimensional correlated Gaussian means.
 *
 * C interface to the shared library. All functions returning rshd_status
 * set a thread-local message retrievable through rshd_last_error() on
 * failure. Handles are opaque; every *_free is safe on NULL.
 *
 * Data convention: K x n matrices, rows = coordinates, columns =
 * observations (n >= 2).
 *
 * Every randomized entry point takes an explicit 64-bit seed; identical
 * inputs and seeds give bit-identical results regardless of the worker
 * count (cap workers with the RESAMP_HD_THREADS environment variable).
 */
#ifndef RESAMPHD_H
#define RESAMPHD_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define RSHD_API __declspec(dllexport)
#else
#define RSHD_API __attribute__((visibility("default")))
#endif

typedef enum rshd_status {
  RSHD_OK = 0,
  RSHD_ERR_INVALID_ARGUMENT = 1,
  RSHD_ERR_CAPACITY = 2,         /* exact enumeration beyond n <= 20 */
  RSHD_ERR_UNSUPPORTED = 3,      /* no guarantee for this combination */
  RSHD_ERR_INFEASIBLE_LEVEL = 4, /* sigma bound vacuous at this (n, delta) */
  RSHD_ERR_DATA_FORMAT = 5,
  RSHD_ERR_IO = 6,
  RSHD_ERR_RUNTIME = 7
} rshd_status;

RSHD_API const char* rshd_version(void);
RSHD_API const char* rshd_status_name(rshd_status status);
RSHD_API const char* rshd_last_error(void);

/* ---------------- data matrices ---------------- */

typedef struct rshd_matrix rshd_matrix;

RSHD_API rshd_status rshd_matrix_create(int32_t K, int32_t n,
                                        const double* row_major,
                                        rshd_matrix** out);
/* Plain CSV, K rows x n columns, no header; leading '#' lines skipped. */
RSHD_API rshd_status rshd_matrix_read_csv(const char* path,
                                          rshd_matrix** out);
RSHD_API void rshd_matrix_free(rshd_matrix* m);
RSHD_API int32_t rshd_matrix_rows(const rshd_matrix* m);
RSHD_API int32_t rshd_matrix_cols(const rshd_matrix* m);
RSHD_API rshd_status rshd_matrix_get(const rshd_matrix* m, int32_t k,
                                     int32_t i, double* out);

/* ---------------- result tables ---------------- */

typedef struct rshd_table rshd_table;

RSHD_API void rshd_table_free(rshd_table* t);
RSHD_API int32_t rshd_table_rows(const rshd_table* t);
RSHD_API int32_t rshd_table_cols(const rshd_table* t);
RSHD_API const char* rshd_table_column(const rshd_table* t, int32_t j);
/* Cell as text; doubles carry full round-trip precision. */
RSHD_API const char* rshd_table_cell(const rshd_table* t, int32_t i,
                                     int32_t j);

/* ---------------- numeric primitives ---------------- */

RSHD_API rshd_status rshd_gauss_upper_tail(double x, double* out);
RSHD_API rshd_status rshd_gauss_upper_quantile(double p, double* out);
RSHD_API rshd_status rshd_binom_upper_quantile(int32_t n, double eta,
                                               int32_t* out);
RSHD_API rshd_status rshd_gamma1(int32_t n, double eta, double* out);
RSHD_API rshd_status rshd_cn_constant(int32_t n, double* out);

/* ---------------- resampling weight constants ----------------
 * scheme: rademacher | efron[:q] | bernoulli:p | poisson[:mu] | rho:q |
 *         loo | vfold:V
 * Output columns: scheme,n,A,B_lower,B_mc,B_mc_stderr,C,D,accuracy,
 * complexity (B_mc columns empty unless mc_draws > 0). */
RSHD_API rshd_status rshd_constants_table(const char* scheme, int32_t n,
                                          int32_t mc_draws, uint64_t seed,
                                          rshd_table** out);

/* ---------------- thresholds and confidence regions ---------------- */

typedef struct rshd_threshold_opts {
  const char* method; /* bonf | conc | conc-bonf | quant-raw | quant-bonf |
                         quant-conc | quant-uncent | iter-quant | bounded */
  const char* side;   /* "one" | "two" (default "two") */
  const char* scheme; /* weight scheme (default "rademacher") */
  const char* phi;    /* "sup" (default) or "lp:<p>[:norm]" */
  int32_t mc_draws;   /* B, default 1000 */
  double delta;       /* level split, default 0.1 */
  double alpha0_frac; /* alpha0 = frac * alpha, default 0.9 */
  double bound_m;     /* M for "bounded" */
  const double* sigma; /* known sigma (length K), or NULL to estimate */
  double sigma_delta;  /* level spent estimating sigma; 0 = alpha/10 */
  const char* iter_alphas; /* comma list of levels for iter-quant, or NULL */
  int32_t exhaustive;      /* exact 2^n sign enumeration (n <= 20) */
  int32_t strict_mc;       /* add Monte Carlo correction terms */
  int32_t allow_unproven;  /* let quant-raw act as a region threshold */
} rshd_threshold_opts;

RSHD_API void rshd_threshold_opts_init(rshd_threshold_opts* opts);

/* Threshold over all K coordinates. Output rows (component,value); the
 * first row is the total. */
RSHD_API rshd_status rshd_threshold_eval(const rshd_matrix* data,
                                         const rshd_threshold_opts* opts,
                                         double alpha, uint64_t seed,
                                         rshd_table** out);

/* Region {x | phi(Ybar - x) <= radius}. Output rows (index,center,radius). */
RSHD_API rshd_status rshd_confidence_region(const rshd_matrix* data,
                                            const rshd_threshold_opts* opts,
                                            double alpha, uint64_t seed,
                                            rshd_table** out);

/* Membership test for a point x of length K (same seed => same region). */
RSHD_API rshd_status rshd_region_contains(const rshd_matrix* data,
                                          const rshd_threshold_opts* opts,
                                          double alpha, uint64_t seed,
                                          const double* x, int32_t* out);

/* ---------------- multiple testing ----------------
 * procedure: holm | single:<method> | sd:<method> | hybrid
 * per_coordinate columns: index,mean,bracket_value,rejected,
 *                         iteration_rejected (0 = never)
 * trace columns: iteration,card,threshold,surviving_card,set */
RSHD_API rshd_status rshd_run_test(const rshd_matrix* data,
                                   const char* procedure,
                                   const rshd_threshold_opts* opts,
                                   double alpha, uint64_t seed,
                                   rshd_table** per_coordinate,
                                   rshd_table** trace);

/* ---------------- torus-field simulations ---------------- */

typedef struct rshd_experiment_opts {
  const char* experiment; /* fig1 | fig2 | fig3 */
  int32_t d, n, trials, B;
  double alpha;
  const char* b_grid; /* "a:b:step" or comma list; NULL = 0,2,4,6 */
  const char* r_grid; /* same syntax; NULL = 0,10,20 */
  double b_fixed;     /* fig3 bandwidth; < 0 = d/4 */
  double amplitude;   /* linear scenario peak, default 20 */
  int32_t ideal_samples; /* default 1000 */
} rshd_experiment_opts;

RSHD_API void rshd_experiment_opts_init(rshd_experiment_opts* opts);

RSHD_API rshd_status rshd_run_experiment(const rshd_experiment_opts* opts,
                                         uint64_t seed, rshd_table** out);

/* One field sample; scenario: zero | linear[:amplitude] | exp:<r_db>. */
RSHD_API rshd_status rshd_sample_field(int32_t d, double b, int32_t n,
                                       const char* scenario, double alpha,
                                       uint64_t seed, rshd_matrix** out);

#ifdef __cplusplus
}
#endif

#endif /* RESAMPHD_H */
