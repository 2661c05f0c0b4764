/*
 * stochsync - networks of diffusively coupled nonlinear nodes driven by
 * state-dependent noise: simulation (Euler-Maruyama / tamed Euler), the
 * spectral synchronization certificate, and empirical Lyapunov-exponent
 * estimation.
 *
 * C API conventions:
 *   - Objects are opaque handles created by ss_*_create-style calls and
 *     released with the matching ss_*_destroy (destroy accepts NULL).
 *   - Functions returning ss_status report failure through the return
 *     code and leave outputs untouched; ss_last_error() returns a
 *     thread-local message for the most recent failure on this thread.
 *   - Plain accessors on valid handles cannot fail; passing NULL returns
 *     a zero value.
 *   - All arrays are row-major double buffers owned by the caller unless
 *     documented otherwise.
 */

#ifndef STOCHSYNC_H
#define STOCHSYNC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SS_API __declspec(dllexport)
#else
#define SS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ss_status {
    SS_OK = 0,
    SS_ERR_INVALID_ARGUMENT = 1, /* bad argument or violated precondition */
    SS_ERR_PARSE = 2,            /* malformed config/graph file (file:line in message) */
    SS_ERR_NOT_APPLICABLE = 3,   /* request outside the theory's scope */
    SS_ERR_UNSUPPORTED_MODEL = 4,/* no closed-form constants for this model */
    SS_ERR_EIGENSOLVER = 5,      /* eigenvalue iteration failed to converge */
    SS_ERR_INSUFFICIENT_DATA = 6,/* too few usable points for a fit */
    SS_ERR_IO = 7,               /* file system failure */
    SS_ERR_NOMEM = 8,
    SS_ERR_INTERNAL = 9
} ss_status;

SS_API const char* ss_last_error(void);
SS_API const char* ss_version(void);

/* ------------------------------------------------------------------ */
/* graphs                                                              */
/* ------------------------------------------------------------------ */

typedef struct ss_graph ss_graph;

/*
 * topology: "chain", "ring", "complete", "star", "edge_list" or
 * "erdos_renyi". For edge_list pass `edges` as edge_count (i, j) pairs
 * (2*edge_count ints); for erdos_renyi pass edge_probability in [0, 1]
 * and a seed. The other topologies ignore those arguments.
 */
SS_API ss_status ss_graph_create(const char* topology, int nodes,
                                 const int* edges, size_t edge_count,
                                 double edge_probability, uint64_t seed,
                                 ss_graph** out);
SS_API void ss_graph_destroy(ss_graph* g);

SS_API int ss_graph_node_count(const ss_graph* g);
SS_API size_t ss_graph_edge_count(const ss_graph* g);

/* Algebraic connectivity; +infinity for the single-node graph. */
SS_API ss_status ss_graph_lambda2(const ss_graph* g, double* out);
/* All Laplacian eigenvalues, ascending; len must equal node count. */
SS_API ss_status ss_graph_eigenvalues(const ss_graph* g, double* out, size_t len);
SS_API ss_status ss_graph_connected(const ss_graph* g, int* out);

/* ------------------------------------------------------------------ */
/* node models                                                         */
/* ------------------------------------------------------------------ */

typedef struct ss_model ss_model;

enum { SS_NOISE_COMMON = 0, SS_NOISE_INDEPENDENT = 1 };

/* dx = (r x - x^3) dt + sigma_n x db, common noise */
SS_API ss_status ss_model_bistable(double r, double sigma_n, ss_model** out);
/* dx = 0: noise-free consensus node */
SS_API ss_status ss_model_integrator(ss_model** out);
/* dx = A x dt + M x db; A and M are dim x dim row-major */
SS_API ss_status ss_model_linear(int dim, const double* drift,
                                 const double* diffusion, ss_model** out);
/* dx = beta dt + sigma_b db_i, independent noise per node */
SS_API ss_status ss_model_ddm(double beta, double sigma_b, ss_model** out);
/* Copy of `m` with the given noise mode. */
SS_API ss_status ss_model_with_noise_mode(const ss_model* m, int noise_mode,
                                          ss_model** out);
SS_API void ss_model_destroy(ss_model* m);

SS_API int ss_model_dim(const ss_model* m);
SS_API int ss_model_noise_mode(const ss_model* m);
/* Valid while the model is alive. */
SS_API const char* ss_model_label(const ss_model* m);

/* f(t, x) and g(t, x); x and out hold ss_model_dim(m) entries. */
SS_API ss_status ss_model_drift(const ss_model* m, double t, const double* x,
                                double* out);
SS_API ss_status ss_model_diffusion(const ss_model* m, double t,
                                    const double* x, double* out);

/* ------------------------------------------------------------------ */
/* model constants                                                     */
/* ------------------------------------------------------------------ */

typedef struct ss_constants {
    double k_f;     /* one-sided (QUAD) drift constant */
    double k_g;     /* diffusion Lipschitz constant */
    double k_g_bar; /* diffusion persistence constant */
    int sampled;    /* 0 analytic, 1 sampled */
} ss_constants;

SS_API ss_status ss_analytic_constants(const ss_model* m, ss_constants* out);
/* Sampled bounds over the box [box_lo, box_hi]^dim from pair_count
 * uniform pairs; deterministic for a fixed seed. */
SS_API ss_status ss_estimate_constants(const ss_model* m, const double* box_lo,
                                       const double* box_hi, int64_t pair_count,
                                       uint64_t seed, ss_constants* out);

/* ------------------------------------------------------------------ */
/* integration                                                         */
/* ------------------------------------------------------------------ */

enum { SS_SCHEME_EULER_MARUYAMA = 0, SS_SCHEME_TAMED_EULER = 1 };

typedef struct ss_sim_config {
    double dt;
    double horizon;
    uint64_t seed;
    int scheme;
    int64_t record_stride;
    double blowup_threshold;
} ss_sim_config;

/* dt = 1e-3, horizon = 1, seed = 0, Euler-Maruyama, stride 1, 1e8. */
SS_API void ss_sim_config_default(ss_sim_config* out);

/*
 * Brownian increments (each ~ Normal(0, dt)) for the given seed, written
 * step-major into `out` with steps * channels entries, where channels is
 * 1 in common mode and node_count in independent mode.
 */
SS_API ss_status ss_brownian_increments(uint64_t seed, int64_t steps, double dt,
                                        int noise_mode, int node_count,
                                        double* out);

typedef struct ss_trajectory ss_trajectory;

/* x0 holds node_count * model_dim entries. */
SS_API ss_status ss_integrate(const ss_graph* g, const ss_model* m, double sigma,
                              const double* x0, size_t x0_len,
                              const ss_sim_config* cfg, ss_trajectory** out);
SS_API void ss_trajectory_destroy(ss_trajectory* t);

SS_API size_t ss_trajectory_rows(const ss_trajectory* t);
SS_API size_t ss_trajectory_width(const ss_trajectory* t); /* N * n */
/* Buffers owned by the trajectory; valid while it is alive. */
SS_API const double* ss_trajectory_times(const ss_trajectory* t);
SS_API const double* ss_trajectory_states(const ss_trajectory* t);
SS_API int ss_trajectory_blew_up(const ss_trajectory* t);
SS_API double ss_trajectory_blowup_time(const ss_trajectory* t);

/* ------------------------------------------------------------------ */
/* analysis                                                            */
/* ------------------------------------------------------------------ */

/* |X(t) - 1_N (x) mean(t)| per recorded step; out holds rows entries. */
SS_API ss_status ss_sync_error_norms(const ss_trajectory* t, double* out);

typedef struct ss_exponent_estimate {
    double exponent;
    double r_squared;
    double window_start;
    double window_end;
    int floored;
    int64_t points_used;
} ss_exponent_estimate;

SS_API ss_status ss_lyapunov_exponent(const double* times, const double* values,
                                      size_t len, double window_fraction,
                                      double floor, ss_exponent_estimate* out);

typedef struct ss_certificate {
    double lambda2;
    double sigma;
    double k_f;
    double k_g;
    double k_g_bar;
    double threshold;       /* k_f + (k_g^2 - 2 k_g_bar^2) / 2 */
    double c2;              /* 2 k_f + k_g^2 - 2 sigma lambda2 */
    double c3;              /* 4 k_g_bar^2 */
    double guaranteed_rate; /* (c3 - 2 c2) / 2 when satisfied, else 0 */
    int satisfied;          /* sigma * lambda2 > threshold, strict */
    int sampled_constants;
} ss_certificate;

/* Fails with SS_ERR_NOT_APPLICABLE for independent-noise models. */
SS_API ss_status ss_certificate_check(const ss_graph* g, const ss_model* m,
                                      double sigma, const ss_constants* constants,
                                      ss_certificate* out);

/* sqrt(2 max(0, r - lambda2)): minimal sigma_n making the bistable
 * certificate hold at unit coupling. */
SS_API ss_status ss_decision_threshold_sigma_n(const ss_graph* g, double r,
                                               double* out);

/* ------------------------------------------------------------------ */
/* Monte Carlo verdict                                                 */
/* ------------------------------------------------------------------ */

enum { SS_X0_NORMAL = 0, SS_X0_VALUES = 1 };

typedef struct ss_x0_spec {
    int kind;
    double mean;          /* SS_X0_NORMAL */
    double stddev;        /* SS_X0_NORMAL */
    uint64_t seed;        /* SS_X0_NORMAL */
    const double* values; /* SS_X0_VALUES: node_count * dim entries */
    size_t values_len;
} ss_x0_spec;

typedef struct ss_mc_options {
    double window_fraction;
    double floor;
    double sync_tol_rel;
    int threads; /* 0 = STOCHSYNC_THREADS env or hardware threads */
} ss_mc_options;

/* window_fraction = 0.5, floor = 1e-12, sync_tol_rel = 1e-6, threads 0. */
SS_API void ss_mc_options_default(ss_mc_options* out);

typedef struct ss_mc_summary ss_mc_summary;

SS_API ss_status ss_monte_carlo(const ss_graph* g, const ss_model* m,
                                double sigma, const ss_sim_config* cfg,
                                int64_t replicates, const ss_x0_spec* x0,
                                const ss_mc_options* options,
                                ss_mc_summary** out);
SS_API void ss_mc_summary_destroy(ss_mc_summary* s);

SS_API int64_t ss_mc_replicates(const ss_mc_summary* s);
SS_API double ss_mc_fraction_synced(const ss_mc_summary* s);
/* NaN when no replicate produced a valid tail fit. */
SS_API double ss_mc_median_exponent(const ss_mc_summary* s);
SS_API int64_t ss_mc_valid_estimates(const ss_mc_summary* s);
SS_API int64_t ss_mc_blowup_count(const ss_mc_summary* s);
SS_API int ss_mc_has_certificate(const ss_mc_summary* s);
SS_API ss_status ss_mc_certificate(const ss_mc_summary* s, ss_certificate* out);
/* estimate_valid reports whether est holds a usable fit. */
SS_API ss_status ss_mc_replicate(const ss_mc_summary* s, int64_t index,
                                 ss_exponent_estimate* est, int* estimate_valid,
                                 int* synced, int* blew_up);

/* ------------------------------------------------------------------ */
/* config-driven experiments                                           */
/* ------------------------------------------------------------------ */

/*
 * Runs one CLI command ("check", "simulate", "sweep", "noise-series" or
 * "lambda2") against a config file. output_dir, when non-NULL, overrides
 * the config's [run] output_dir; seed_override (when has_seed_override)
 * replaces [sim] seed. quiet suppresses stdout. Artifacts land in the
 * output directory.
 */
SS_API ss_status ss_run_command(const char* command, const char* config_path,
                                const char* output_dir, int has_seed_override,
                                uint64_t seed_override, int quiet);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* STOCHSYNC_H */
