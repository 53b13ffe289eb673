/* Copyright 2026 The guided-es Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the guided evolutionary strategies library.
 *
 * Guided ES estimates descent directions for black-box objectives by
 * antithetic random search whose Gaussian search distribution is elongated
 * along a low-dimensional subspace spanned by recent surrogate gradients.
 * The library provides the estimator itself (ges_session_*), the closed-form
 * bias/variance analysis with the optimal-hyperparameter solver (ges_*), and
 * a benchmark harness that writes CSV traces (ges_run_experiment_csv).
 *
 * All functions returning int yield GES_OK (0) on success and a ges_status
 * code otherwise; ges_last_error_message() describes the most recent failure
 * on the calling thread. Runs are deterministic: identical seeds give
 * bitwise-identical results at any thread count (cap workers with the
 * GUIDED_ES_THREADS environment variable).
 */

#ifndef GUIDED_ES_H_
#define GUIDED_ES_H_

#include <stdint.h>

#if defined(_WIN32)
#define GES_API __declspec(dllexport)
#else
#define GES_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ges_status {
  GES_OK = 0,
  GES_ERROR_INVALID_ARGUMENT = 1,
  GES_ERROR_DIMENSION_MISMATCH = 2,
  GES_ERROR_DEGENERATE_SUBSPACE = 3,
  GES_ERROR_NONFINITE_OBJECTIVE = 4,
  GES_ERROR_IO = 5,
  GES_ERROR_UNKNOWN = 6
} ges_status;

GES_API const char* ges_status_name(int status);

/* Message for the most recent failure on this thread; empty after success. */
GES_API const char* ges_last_error_message(void);

GES_API void ges_version(int* major, int* minor, int* patch);

/* Search-distribution hyperparameters. The implied covariance is
 *   Sigma = (alpha/n) I + ((1-alpha)/k) U U^T,
 * trace one for any orthonormal basis U. alpha=1 is plain isotropic ES. */
typedef struct ges_search_config {
  double alpha;         /* subspace/full-space tradeoff in [0, 1] */
  double beta;          /* overall estimate scale, >= 0 */
  double sigma;         /* perturbation scale, > 0 */
  int32_t pairs;        /* antithetic pairs per estimate, >= 1 */
  int32_t subspace_dim; /* k, 1 <= k <= n */
  int32_t param_dim;    /* n */
} ges_search_config;

/* Fills defaults: alpha 1/2, beta 2, sigma 0.1, one pair. */
GES_API int ges_search_config_init(ges_search_config* cfg, int32_t param_dim,
                                   int32_t subspace_dim);
GES_API int ges_search_config_validate(const ges_search_config* cfg);

/* ---- Closed-form error analysis --------------------------------------- */

/* Normalized squared bias / total variance of the estimate as functions of
 * (alpha, beta, k, n) and the squared correlation rho_sq between the true
 * gradient and the guiding subspace. */
GES_API int ges_normalized_bias(double alpha, double beta, int32_t k,
                                int32_t n, double rho_sq, double* out);
GES_API int ges_normalized_variance(double alpha, double beta, int32_t k,
                                    int32_t n, double rho_sq, double* out);
GES_API int ges_error_objective(double alpha, double beta, int32_t k,
                                int32_t n, double rho_sq, double* bias,
                                double* variance, double* total);

/* Exact minimizer of bias + variance over beta >= 0, 0 <= alpha <= 1. */
GES_API int ges_optimal_hyperparameters(int32_t k, int32_t n, double rho,
                                        double* alpha_star, double* beta_star);

/* Correlation thresholds sqrt(k/n) and sqrt((k+4)/(n+4)) bracketing the
 * regime where the optimum is interior. */
GES_API int ges_regime_boundaries(int32_t k, int32_t n, double* rho_lower,
                                  double* rho_upper);

/* ---- Optimization session --------------------------------------------- */

/* Opaque handle owning the iterate, the surrogate-gradient FIFO, the
 * deterministic sampler state, and the cost counters. */
typedef struct ges_session ges_session;

/* Black-box objective callback. Return the loss at x (length n); return a
 * non-finite value to signal an evaluation failure. */
typedef double (*ges_objective_fn)(void* user_data, const double* x,
                                   int32_t n);

GES_API ges_session* ges_session_create(const ges_search_config* cfg,
                                        const double* x0, uint64_t seed);
GES_API void ges_session_destroy(ges_session* session);

/* Pushes one surrogate gradient into the guiding subspace FIFO (oldest entry
 * evicted) and bumps the surrogate-gradient counter. */
GES_API int ges_session_feed_surrogate(ges_session* session,
                                       const double* grad, int32_t n);

/* Draws the configured antithetic pairs around the current iterate and
 * writes the descent-direction estimate (length n). Costs 2 * pairs
 * objective evaluations. With an empty or direction-free FIFO the search
 * falls back to plain isotropic ES for this estimate. */
GES_API int ges_session_estimate(ges_session* session,
                                 ges_objective_fn objective, void* user_data,
                                 double* estimate_out);

/* Gradient-descent update x <- x - learning_rate * estimate. */
GES_API int ges_session_apply_update(ges_session* session,
                                     const double* estimate,
                                     double learning_rate);

/* estimate + apply_update in one call. */
GES_API int ges_session_step(ges_session* session, ges_objective_fn objective,
                             void* user_data, double learning_rate);

GES_API int ges_session_position(const ges_session* session, double* x_out);
GES_API int ges_session_counters(const ges_session* session,
                                 int64_t* function_evals,
                                 int64_t* surrogate_grad_evals);

/* Norm of the uncentered correlation between a reference gradient and the
 * current guiding subspace: 0 (orthogonal) .. 1 (contained). Measurement
 * only; never consumed by updates. */
GES_API int ges_session_subspace_correlation(const ges_session* session,
                                             const double* reference_grad,
                                             double* rho_out);

/* ---- Benchmark experiments --------------------------------------------- */

typedef struct ges_experiment_options {
  const uint64_t* seeds; /* NULL => seeds 0..9 */
  int32_t n_seeds;
  int64_t iterations;   /* <= 0 => per-experiment default */
  double learning_rate; /* <= 0 => per-experiment default */
  double alpha;         /* <  0 => 0.5 */
  double beta;          /* <  0 => 2.0 */
  double sigma;         /* <= 0 => per-experiment default */
  int32_t pairs;        /* <= 0 => 1 */
  int32_t subspace_dim; /* <= 0 => per-experiment default */
} ges_experiment_options;

GES_API int ges_experiment_options_init(ges_experiment_options* options);

/* Runs a benchmark experiment ("quadratic", "unrolled", "synthetic") with an
 * algorithm ("guided_es", "vanilla_es", "sgd_surrogate", "adam_surrogate")
 * across seeds, aggregates the traces, and writes
 *   iteration,metric,mean,stderr,stddev,n_seeds,fn_evals,sg_evals
 * to csv_path plus a <csv_path>.meta.json sidecar describing the run. */
GES_API int ges_run_experiment_csv(const char* experiment,
                                   const char* algorithm,
                                   const ges_experiment_options* options,
                                   const char* csv_path);

/* Bias/variance/total surface over (alpha, beta) in [0,1] x [0,4] at fixed
 * (k, n, rho), as alpha,beta,bias,variance,total rows on a grid x grid
 * lattice. */
GES_API int ges_write_surface_csv(int32_t k, int32_t n, double rho,
                                  int32_t grid, const char* csv_path);

/* Optimal hyperparameters over the (k/n, rho) plane for fixed n, one row per
 * (k, rho) grid point, with the regime boundaries alongside. */
GES_API int ges_write_regimes_csv(int32_t n, int32_t rho_grid,
                                  const char* csv_path);

#ifdef __cplusplus
}
#endif

#endif /* GUIDED_ES_H_ */
