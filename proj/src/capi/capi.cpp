// C API layer: opaque-handle wrappers over the C++ core, mapping
// exceptions onto ss_status codes and a thread-local error message.

#include "stochsync/stochsync.h"

#include <cstring>
#include <iostream>
#include <new>
#include <string>

#include "core/analysis.hpp"
#include "core/errors.hpp"
#include "core/experiment.hpp"
#include "core/graph.hpp"
#include "core/model.hpp"
#include "core/sde.hpp"

using namespace stochsync;

struct ss_graph {
    Graph impl;
};
struct ss_model {
    NodeModel impl;
};
struct ss_trajectory {
    Trajectory impl;
};
struct ss_mc_summary {
    McSummary impl;
};

namespace {

thread_local std::string g_last_error;

ss_status set_error(ss_status code, const char* what) {
    g_last_error = what ? what : "";
    return code;
}

template <typename Fn>
ss_status guard(Fn&& fn) noexcept {
    try {
        fn();
        return SS_OK;
    } catch (const ParseError& e) {
        return set_error(SS_ERR_PARSE, e.what());
    } catch (const NotApplicableError& e) {
        return set_error(SS_ERR_NOT_APPLICABLE, e.what());
    } catch (const UnsupportedModelError& e) {
        return set_error(SS_ERR_UNSUPPORTED_MODEL, e.what());
    } catch (const EigensolverError& e) {
        return set_error(SS_ERR_EIGENSOLVER, e.what());
    } catch (const InsufficientDataError& e) {
        return set_error(SS_ERR_INSUFFICIENT_DATA, e.what());
    } catch (const IoError& e) {
        return set_error(SS_ERR_IO, e.what());
    } catch (const ValidationError& e) {
        return set_error(SS_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return set_error(SS_ERR_NOMEM, "out of memory");
    } catch (const std::exception& e) {
        return set_error(SS_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(SS_ERR_INTERNAL, "unknown error");
    }
}

ss_status require(bool ok, const char* what) {
    return ok ? SS_OK : set_error(SS_ERR_INVALID_ARGUMENT, what);
}

ss_certificate to_c(const SyncCertificate& c) {
    ss_certificate out{};
    out.lambda2 = c.lambda2;
    out.sigma = c.sigma;
    out.k_f = c.k_f;
    out.k_g = c.k_g;
    out.k_g_bar = c.k_g_bar;
    out.threshold = c.threshold;
    out.c2 = c.c2;
    out.c3 = c.c3;
    out.guaranteed_rate = c.guaranteed_rate;
    out.satisfied = c.satisfied ? 1 : 0;
    out.sampled_constants =
        c.constants_provenance == ConstantsProvenance::sampled ? 1 : 0;
    return out;
}

ss_exponent_estimate to_c(const ExponentEstimate& e) {
    ss_exponent_estimate out{};
    out.exponent = e.exponent;
    out.r_squared = e.r_squared;
    out.window_start = e.window_start;
    out.window_end = e.window_end;
    out.floored = e.floored ? 1 : 0;
    out.points_used = e.points_used;
    return out;
}

ModelConstants from_c(const ss_constants& c) {
    ModelConstants out;
    out.k_f = c.k_f;
    out.k_g = c.k_g;
    out.k_g_bar = c.k_g_bar;
    out.provenance =
        c.sampled ? ConstantsProvenance::sampled : ConstantsProvenance::analytic;
    return out;
}

SimConfig from_c(const ss_sim_config& c) {
    SimConfig out;
    out.dt = c.dt;
    out.horizon = c.horizon;
    out.seed = c.seed;
    out.scheme = c.scheme == SS_SCHEME_TAMED_EULER ? Scheme::tamed_euler
                                                   : Scheme::euler_maruyama;
    out.record_stride = c.record_stride;
    out.blowup_threshold = c.blowup_threshold;
    return out;
}

NoiseMode noise_mode_from_c(int mode) {
    if (mode != SS_NOISE_COMMON && mode != SS_NOISE_INDEPENDENT)
        throw ValidationError("noise_mode must be SS_NOISE_COMMON or "
                              "SS_NOISE_INDEPENDENT");
    return mode == SS_NOISE_COMMON ? NoiseMode::common : NoiseMode::independent;
}

} // namespace

extern "C" {

const char* ss_last_error(void) { return g_last_error.c_str(); }

const char* ss_version(void) { return "1.0.0"; }

/* graphs ------------------------------------------------------------ */

ss_status ss_graph_create(const char* topology, int nodes, const int* edges,
                          size_t edge_count, double edge_probability,
                          uint64_t seed, ss_graph** out) {
    if (ss_status s = require(topology && out, "null argument")) return s;
    if (ss_status s = require(edge_count == 0 || edges, "edges is null"))
        return s;
    return guard([&] {
        TopologyParams params;
        params.edge_probability = edge_probability;
        params.seed = seed;
        params.edges.reserve(edge_count);
        for (size_t i = 0; i < edge_count; ++i)
            params.edges.emplace_back(edges[2 * i], edges[2 * i + 1]);
        Graph g = build_topology(topology_kind_from_string(topology), nodes,
                                 params);
        *out = new ss_graph{std::move(g)};
    });
}

void ss_graph_destroy(ss_graph* g) { delete g; }

int ss_graph_node_count(const ss_graph* g) {
    return g ? g->impl.node_count() : 0;
}

size_t ss_graph_edge_count(const ss_graph* g) {
    return g ? g->impl.edges().size() : 0;
}

ss_status ss_graph_lambda2(const ss_graph* g, double* out) {
    if (ss_status s = require(g && out, "null argument")) return s;
    return guard([&] { *out = spectral_info(g->impl).lambda2; });
}

ss_status ss_graph_eigenvalues(const ss_graph* g, double* out, size_t len) {
    if (ss_status s = require(g && out, "null argument")) return s;
    return guard([&] {
        SpectralInfo info = spectral_info(g->impl);
        if (len != info.eigenvalues.size())
            throw ValidationError("eigenvalue buffer holds " +
                                  std::to_string(len) + " entries, need " +
                                  std::to_string(info.eigenvalues.size()));
        std::memcpy(out, info.eigenvalues.data(), len * sizeof(double));
    });
}

ss_status ss_graph_connected(const ss_graph* g, int* out) {
    if (ss_status s = require(g && out, "null argument")) return s;
    return guard([&] { *out = spectral_info(g->impl).connected ? 1 : 0; });
}

/* models ------------------------------------------------------------ */

ss_status ss_model_bistable(double r, double sigma_n, ss_model** out) {
    if (ss_status s = require(out != nullptr, "null argument")) return s;
    return guard([&] { *out = new ss_model{NodeModel::bistable(r, sigma_n)}; });
}

ss_status ss_model_integrator(ss_model** out) {
    if (ss_status s = require(out != nullptr, "null argument")) return s;
    return guard([&] { *out = new ss_model{NodeModel::integrator()}; });
}

ss_status ss_model_linear(int dim, const double* drift, const double* diffusion,
                          ss_model** out) {
    if (ss_status s = require(drift && diffusion && out, "null argument"))
        return s;
    return guard([&] {
        if (dim < 1) throw ValidationError("linear: dim must be >= 1");
        Matrix a(dim, dim), g(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                a(i, j) = drift[static_cast<size_t>(i) * dim + j];
                g(i, j) = diffusion[static_cast<size_t>(i) * dim + j];
            }
        *out = new ss_model{NodeModel::linear(a, g)};
    });
}

ss_status ss_model_ddm(double beta, double sigma_b, ss_model** out) {
    if (ss_status s = require(out != nullptr, "null argument")) return s;
    return guard([&] { *out = new ss_model{NodeModel::ddm(beta, sigma_b)}; });
}

ss_status ss_model_with_noise_mode(const ss_model* m, int noise_mode,
                                   ss_model** out) {
    if (ss_status s = require(m && out, "null argument")) return s;
    return guard([&] {
        *out = new ss_model{m->impl.with_noise_mode(noise_mode_from_c(noise_mode))};
    });
}

void ss_model_destroy(ss_model* m) { delete m; }

int ss_model_dim(const ss_model* m) { return m ? m->impl.dim() : 0; }

int ss_model_noise_mode(const ss_model* m) {
    return m && m->impl.noise_mode() == NoiseMode::independent
               ? SS_NOISE_INDEPENDENT
               : SS_NOISE_COMMON;
}

const char* ss_model_label(const ss_model* m) {
    return m ? m->impl.label().c_str() : "";
}

ss_status ss_model_drift(const ss_model* m, double t, const double* x,
                         double* out) {
    if (ss_status s = require(m && x && out, "null argument")) return s;
    return guard([&] {
        const size_t n = static_cast<size_t>(m->impl.dim());
        m->impl.drift(t, {x, n}, {out, n});
    });
}

ss_status ss_model_diffusion(const ss_model* m, double t, const double* x,
                             double* out) {
    if (ss_status s = require(m && x && out, "null argument")) return s;
    return guard([&] {
        const size_t n = static_cast<size_t>(m->impl.dim());
        m->impl.diffusion(t, {x, n}, {out, n});
    });
}

/* constants ----------------------------------------------------------- */

ss_status ss_analytic_constants(const ss_model* m, ss_constants* out) {
    if (ss_status s = require(m && out, "null argument")) return s;
    return guard([&] {
        ModelConstants c = analytic_constants(m->impl);
        *out = ss_constants{c.k_f, c.k_g, c.k_g_bar, 0};
    });
}

ss_status ss_estimate_constants(const ss_model* m, const double* box_lo,
                                const double* box_hi, int64_t pair_count,
                                uint64_t seed, ss_constants* out) {
    if (ss_status s = require(m && box_lo && box_hi && out, "null argument"))
        return s;
    return guard([&] {
        const size_t n = static_cast<size_t>(m->impl.dim());
        ModelConstants c = estimate_constants(m->impl, {box_lo, n}, {box_hi, n},
                                              pair_count, seed);
        *out = ss_constants{c.k_f, c.k_g, c.k_g_bar, 1};
    });
}

/* integration --------------------------------------------------------- */

void ss_sim_config_default(ss_sim_config* out) {
    if (!out) return;
    SimConfig d;
    out->dt = d.dt;
    out->horizon = d.horizon;
    out->seed = d.seed;
    out->scheme = SS_SCHEME_EULER_MARUYAMA;
    out->record_stride = d.record_stride;
    out->blowup_threshold = d.blowup_threshold;
}

ss_status ss_brownian_increments(uint64_t seed, int64_t steps, double dt,
                                 int noise_mode, int node_count, double* out) {
    if (ss_status s = require(out != nullptr, "null argument")) return s;
    return guard([&] {
        BrownianPath path = brownian_path(seed, steps, dt,
                                          noise_mode_from_c(noise_mode),
                                          node_count);
        std::memcpy(out, path.increments.data(),
                    path.increments.size() * sizeof(double));
    });
}

ss_status ss_integrate(const ss_graph* g, const ss_model* m, double sigma,
                       const double* x0, size_t x0_len,
                       const ss_sim_config* cfg, ss_trajectory** out) {
    if (ss_status s = require(g && m && x0 && cfg && out, "null argument"))
        return s;
    return guard([&] {
        Trajectory t =
            integrate(g->impl, m->impl, sigma, {x0, x0_len}, from_c(*cfg));
        *out = new ss_trajectory{std::move(t)};
    });
}

void ss_trajectory_destroy(ss_trajectory* t) { delete t; }

size_t ss_trajectory_rows(const ss_trajectory* t) {
    return t ? t->impl.rows() : 0;
}

size_t ss_trajectory_width(const ss_trajectory* t) {
    return t ? static_cast<size_t>(t->impl.node_count) * t->impl.node_dim : 0;
}

const double* ss_trajectory_times(const ss_trajectory* t) {
    return t ? t->impl.times.data() : nullptr;
}

const double* ss_trajectory_states(const ss_trajectory* t) {
    return t ? t->impl.states.data() : nullptr;
}

int ss_trajectory_blew_up(const ss_trajectory* t) {
    return t && t->impl.blew_up ? 1 : 0;
}

double ss_trajectory_blowup_time(const ss_trajectory* t) {
    return t && t->impl.blew_up ? t->impl.blowup_time : 0.0;
}

/* analysis ------------------------------------------------------------ */

ss_status ss_sync_error_norms(const ss_trajectory* t, double* out) {
    if (ss_status s = require(t && out, "null argument")) return s;
    return guard([&] {
        SyncErrorSeries err = sync_error(t->impl);
        std::memcpy(out, err.total_norm.data(),
                    err.total_norm.size() * sizeof(double));
    });
}

ss_status ss_lyapunov_exponent(const double* times, const double* values,
                               size_t len, double window_fraction, double floor,
                               ss_exponent_estimate* out) {
    if (ss_status s = require(times && values && out, "null argument"))
        return s;
    return guard([&] {
        *out = to_c(lyapunov_exponent({times, len}, {values, len},
                                      window_fraction, floor));
    });
}

ss_status ss_certificate_check(const ss_graph* g, const ss_model* m,
                               double sigma, const ss_constants* constants,
                               ss_certificate* out) {
    if (ss_status s = require(g && m && constants && out, "null argument"))
        return s;
    return guard([&] {
        *out = to_c(certificate(g->impl, m->impl, sigma, from_c(*constants)));
    });
}

ss_status ss_decision_threshold_sigma_n(const ss_graph* g, double r,
                                        double* out) {
    if (ss_status s = require(g && out, "null argument")) return s;
    return guard([&] { *out = decision_threshold_sigma_n(g->impl, r); });
}

/* Monte Carlo --------------------------------------------------------- */

void ss_mc_options_default(ss_mc_options* out) {
    if (!out) return;
    McOptions d;
    out->window_fraction = d.window_fraction;
    out->floor = d.floor;
    out->sync_tol_rel = d.sync_tol_rel;
    out->threads = d.threads;
}

ss_status ss_monte_carlo(const ss_graph* g, const ss_model* m, double sigma,
                         const ss_sim_config* cfg, int64_t replicates,
                         const ss_x0_spec* x0, const ss_mc_options* options,
                         ss_mc_summary** out) {
    if (ss_status s = require(g && m && cfg && x0 && out, "null argument"))
        return s;
    return guard([&] {
        X0Spec spec;
        if (x0->kind == SS_X0_VALUES) {
            if (!x0->values)
                throw ValidationError("x0 values pointer is null");
            spec.kind = X0Spec::Kind::explicit_values;
            spec.values.assign(x0->values, x0->values + x0->values_len);
        } else if (x0->kind == SS_X0_NORMAL) {
            spec.kind = X0Spec::Kind::normal;
            spec.mean = x0->mean;
            spec.stddev = x0->stddev;
            spec.seed = x0->seed;
        } else {
            throw ValidationError("x0 kind must be SS_X0_NORMAL or SS_X0_VALUES");
        }
        McOptions opts;
        if (options) {
            opts.window_fraction = options->window_fraction;
            opts.floor = options->floor;
            opts.sync_tol_rel = options->sync_tol_rel;
            opts.threads = options->threads;
        }
        McSummary summary = monte_carlo_verdict(g->impl, m->impl, sigma,
                                                from_c(*cfg), replicates, spec,
                                                opts);
        *out = new ss_mc_summary{std::move(summary)};
    });
}

void ss_mc_summary_destroy(ss_mc_summary* s) { delete s; }

int64_t ss_mc_replicates(const ss_mc_summary* s) {
    return s ? static_cast<int64_t>(s->impl.replicates.size()) : 0;
}

double ss_mc_fraction_synced(const ss_mc_summary* s) {
    return s ? s->impl.fraction_synced : 0.0;
}

double ss_mc_median_exponent(const ss_mc_summary* s) {
    return s ? s->impl.median_exponent : 0.0;
}

int64_t ss_mc_valid_estimates(const ss_mc_summary* s) {
    return s ? s->impl.valid_estimates : 0;
}

int64_t ss_mc_blowup_count(const ss_mc_summary* s) {
    return s ? s->impl.blowup_count : 0;
}

int ss_mc_has_certificate(const ss_mc_summary* s) {
    return s && s->impl.has_certificate ? 1 : 0;
}

ss_status ss_mc_certificate(const ss_mc_summary* s, ss_certificate* out) {
    if (ss_status st = require(s && out, "null argument")) return st;
    if (!s->impl.has_certificate)
        return set_error(SS_ERR_NOT_APPLICABLE,
                         "summary carries no certificate (independent noise "
                         "or no closed-form constants)");
    *out = to_c(s->impl.cert);
    return SS_OK;
}

ss_status ss_mc_replicate(const ss_mc_summary* s, int64_t index,
                          ss_exponent_estimate* est, int* estimate_valid,
                          int* synced, int* blew_up) {
    if (ss_status st = require(s != nullptr, "null argument")) return st;
    if (index < 0 || index >= static_cast<int64_t>(s->impl.replicates.size()))
        return set_error(SS_ERR_INVALID_ARGUMENT, "replicate index out of range");
    const ReplicateResult& r =
        s->impl.replicates[static_cast<size_t>(index)];
    if (est) *est = to_c(r.estimate);
    if (estimate_valid) *estimate_valid = r.estimate_valid ? 1 : 0;
    if (synced) *synced = r.synced ? 1 : 0;
    if (blew_up) *blew_up = r.blew_up ? 1 : 0;
    return SS_OK;
}

/* experiments ----------------------------------------------------------- */

ss_status ss_run_command(const char* command, const char* config_path,
                         const char* output_dir, int has_seed_override,
                         uint64_t seed_override, int quiet) {
    if (ss_status s = require(command && config_path, "null argument"))
        return s;
    return guard([&] {
        ExperimentConfig cfg = load_config(config_path);
        if (output_dir) cfg.output_dir = output_dir;
        if (has_seed_override) cfg.sim.seed = seed_override;
        std::ostream* out = quiet ? nullptr : &std::cout;
        const std::string verb = command;
        if (verb == "check")
            cmd_check(cfg, out);
        else if (verb == "simulate")
            cmd_simulate(cfg, out);
        else if (verb == "sweep")
            cmd_sweep(cfg, out);
        else if (verb == "noise-series")
            cmd_noise_series(cfg, out);
        else if (verb == "lambda2")
            cmd_lambda2(cfg, out);
        else
            throw ValidationError("unknown command '" + verb +
                                  "' (expected check, simulate, sweep, "
                                  "noise-series or lambda2)");
    });
}

} // extern "C"
