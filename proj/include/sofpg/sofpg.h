/*
 Copyright 2026 The sofpg Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

/* C interface to the sofpg library.
 *
 * sofpg learns static output feedback gains u = -K y for unknown discrete-time
 * linear systems from rollout costs alone, using two-point zeroth-order policy
 * gradient with an increasing discount factor.
 *
 * Conventions:
 *  - Every fallible call returns sofpg_status; SOFPG_OK is zero. On failure
 *    sofpg_last_error() describes the error of the calling thread.
 *  - Objects are opaque handles created by *_load / *_preset / *_run calls and
 *    released with the matching *_free. Passing NULL to *_free is a no-op.
 *  - Matrices are row-major arrays of doubles. A gain K has m rows and p
 *    columns (see sofpg_config_dims).
 *  - Text outputs use the snprintf convention: at most `capacity` bytes
 *    including the terminator are written, and `*needed` (if not NULL)
 *    receives the full length excluding the terminator.
 */
#ifndef SOFPG_SOFPG_H
#define SOFPG_SOFPG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SOFPG_API __declspec(dllexport)
#elif defined(__GNUC__)
#define SOFPG_API __attribute__((visibility("default")))
#else
#define SOFPG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sofpg_status {
    SOFPG_OK = 0,
    SOFPG_ERR_INVALID_ARGUMENT = 1,
    SOFPG_ERR_DIMENSION = 2,
    SOFPG_ERR_DOMAIN = 3,
    SOFPG_ERR_INSTABILITY = 4,
    SOFPG_ERR_DIVERGENCE = 5,
    SOFPG_ERR_NUMERICAL = 6,
    SOFPG_ERR_IO = 7,
    SOFPG_ERR_INTERNAL = 8
} sofpg_status;

typedef enum sofpg_run_status {
    SOFPG_RUN_STABILIZED = 0,
    SOFPG_RUN_MAX_ITERATIONS = 1,
    SOFPG_RUN_DIVERGED = 2
} sofpg_run_status;

typedef struct sofpg_config sofpg_config;
typedef struct sofpg_result sofpg_result;
typedef struct sofpg_report sofpg_report;

typedef struct sofpg_theory_constants {
    double nu;
    double kappa;
    double varrho;
    double d_radius;
    double g;
    double l;
    double g0;
} sofpg_theory_constants;

typedef struct sofpg_schedule_inputs {
    double nu;
    double eps;
    double delta0;
    double delta1;
    double zeta;
    double gamma0;
    double j_bar;
} sofpg_schedule_inputs;

typedef struct sofpg_schedule_report {
    double nu;
    double r;
    double tau_e;
    double n_e;
    double eta;
    double tau;
    double n;
    double m_iters;
    double k_prime;
} sofpg_schedule_report;

typedef struct sofpg_oracle_report {
    double cost;          /* J_gamma(K) */
    double rho;           /* rho(A - BKC) */
    double damped_rho;    /* sqrt(gamma) rho(A - BKC) */
    double margin_bound;  /* sqrt(1 - l0 / J_gamma(K)) */
    double grad_norm;     /* ||grad J_gamma(K)||_F */
} sofpg_oracle_report;

typedef struct sofpg_run_summary {
    int status; /* sofpg_run_status */
    uint64_t seed;
    size_t outer_iterations;
    double gamma_final;
    uint64_t total_trajectories;
    double final_rho; /* NaN when oracle logging is off */
} sofpg_run_summary;

SOFPG_API const char* sofpg_version(void);
SOFPG_API const char* sofpg_last_error(void);
SOFPG_API const char* sofpg_status_name(sofpg_status status);

/* ---- configuration ---- */

SOFPG_API sofpg_status sofpg_config_load(const char* path, sofpg_config** out);
SOFPG_API sofpg_status sofpg_config_parse(const char* text, sofpg_config** out);
SOFPG_API sofpg_status sofpg_config_preset(const char* name, sofpg_config** out);
SOFPG_API void sofpg_config_free(sofpg_config* cfg);

/* Replaces one "section.key" entry, e.g. ("stabilizer.gamma0", "0.9"). The
 * config is re-validated; on error it is left unchanged. */
SOFPG_API sofpg_status sofpg_config_set(sofpg_config* cfg, const char* key, const char* value);

SOFPG_API sofpg_status sofpg_config_dims(const sofpg_config* cfg, size_t* n, size_t* m, size_t* p);
SOFPG_API sofpg_status sofpg_config_runs(const sofpg_config* cfg, size_t* runs);
SOFPG_API sofpg_status sofpg_config_seed(const sofpg_config* cfg, uint64_t* seed);
SOFPG_API sofpg_status sofpg_config_to_string(const sofpg_config* cfg, char* buffer,
                                              size_t capacity, size_t* needed);
SOFPG_API sofpg_status sofpg_config_write(const sofpg_config* cfg, const char* path);

/* Parses a gain file (JSON row list or whitespace rows) into `gain`, which
 * must hold m * p doubles for the config's dimensions. */
SOFPG_API sofpg_status sofpg_gain_load(const sofpg_config* cfg, const char* path, double* gain,
                                       size_t len);

/* ---- model-free estimates ---- */

/* Two-point gradient estimate with the config's r, tau_e, n_e. */
SOFPG_API sofpg_status sofpg_estimate_gradient(const sofpg_config* cfg, double gamma,
                                               const double* gain, uint64_t seed, int threads,
                                               double* grad_out, double* fro_norm,
                                               uint64_t* trajectories);

/* Empirical cost with the config's tau, n. */
SOFPG_API sofpg_status sofpg_estimate_cost(const sofpg_config* cfg, double gamma,
                                           const double* gain, uint64_t seed, int threads,
                                           double* cost);

/* ---- white-box oracle (reads the true system matrices) ---- */

/* grad_out may be NULL. Fails with SOFPG_ERR_INSTABILITY outside the
 * stabilizing set, in which case report->rho and report->damped_rho are
 * still filled. */
SOFPG_API sofpg_status sofpg_oracle_evaluate(const sofpg_config* cfg, double gamma,
                                             const double* gain, sofpg_oracle_report* report,
                                             double* grad_out);

SOFPG_API sofpg_status sofpg_theory_constants_compute(const sofpg_config* cfg, double nu,
                                                      sofpg_theory_constants* out);

/* Fills *inputs with the defaults used by the schedule command: eps and
 * zeta from the config, gamma0 from the config, delta0 = 0.01,
 * delta1 = 0.1, j_bar = nu. */
SOFPG_API sofpg_status sofpg_schedule_defaults(const sofpg_config* cfg, double nu,
                                               sofpg_schedule_inputs* inputs);
SOFPG_API sofpg_status sofpg_schedule_compute(const sofpg_config* cfg,
                                              const sofpg_schedule_inputs* inputs,
                                              sofpg_schedule_report* out);

/* ---- learning ---- */

SOFPG_API sofpg_status sofpg_learn(const sofpg_config* cfg, uint64_t seed, int threads,
                                   sofpg_result** out);
SOFPG_API void sofpg_result_free(sofpg_result* result);
SOFPG_API sofpg_status sofpg_result_summary(const sofpg_result* result, sofpg_run_summary* out);
SOFPG_API sofpg_status sofpg_result_gain(const sofpg_result* result, double* gain, size_t len);
SOFPG_API sofpg_status sofpg_result_message(const sofpg_result* result, char* buffer,
                                            size_t capacity, size_t* needed);
/* Trace CSV with header
 * outer_k,inner_j,gamma,grad_norm_est,cost_est,traj_cum,true_cost,true_rho */
SOFPG_API sofpg_status sofpg_result_trace_csv(const sofpg_result* result, char* buffer,
                                              size_t capacity, size_t* needed);

/* Runs `runs` seeded runs (seeds base_seed .. base_seed + runs - 1). When
 * out_dir is not NULL, writes run_<i>.csv, aggregate.csv and summary.csv
 * there. */
SOFPG_API sofpg_status sofpg_experiment_run(const sofpg_config* cfg, size_t runs,
                                            uint64_t base_seed, int threads,
                                            const char* out_dir, sofpg_report** out);
SOFPG_API void sofpg_report_free(sofpg_report* report);
SOFPG_API sofpg_status sofpg_report_counts(const sofpg_report* report, size_t* runs,
                                           size_t* successes, size_t* verified_stable,
                                           double* mean_total_trajectories);
SOFPG_API sofpg_status sofpg_report_run(const sofpg_report* report, size_t index,
                                        sofpg_run_summary* out);

/* Thread count from the SOFPG_THREADS environment variable (default 1). */
SOFPG_API int sofpg_default_threads(void);

#ifdef __cplusplus
}
#endif

#endif /* SOFPG_SOFPG_H */
