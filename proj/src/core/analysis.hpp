// Synchronization analysis: the spectral sufficient condition (certificate),
// the synchronization error process e = X - 1_N (x) s(t), empirical
// almost-sure Lyapunov exponents from trajectory tails, and a Monte Carlo
// synchronized/not-synchronized verdict over independent replicates.

#ifndef STOCHSYNC_CORE_ANALYSIS_HPP
#define STOCHSYNC_CORE_ANALYSIS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "core/graph.hpp"
#include "core/model.hpp"
#include "core/sde.hpp"

namespace stochsync {

// s(t_k) = (1/N) sum_i x_i(t_k), one row of node_dim entries per record.
std::vector<double> mean_trajectory(const Trajectory& traj);

struct SyncErrorSeries {
    int node_count = 0;
    int node_dim = 0;
    std::vector<double> times;
    std::vector<double> error;      // rows x (N*n), e = X - 1_N (x) s
    std::vector<double> total_norm; // rows, |e(t)|
    std::vector<double> node_norm;  // rows x N, |e_i(t)|
};

SyncErrorSeries sync_error(const Trajectory& traj);

struct ExponentEstimate {
    double exponent = 0.0;  // least-squares slope of log|e| vs t
    double r_squared = 0.0; // in [0, 1]
    double window_start = 0.0;
    double window_end = 0.0;
    bool floored = false; // series touched the floor before the end
    std::int64_t points_used = 0;
};

// Tail fit of log(values) against times over the final `window_fraction`
// of the time span, truncated at the first floor crossing. The window must
// exclude at least the first fifth of the span, so window_fraction lies in
// (0, 0.8]. Throws InsufficientDataError when fewer than 10 usable points
// remain, ValidationError on malformed arguments.
ExponentEstimate lyapunov_exponent(std::span<const double> times,
                                   std::span<const double> values,
                                   double window_fraction = 0.5,
                                   double floor = 1e-12);

struct SyncCertificate {
    double lambda2 = 0.0;
    double sigma = 0.0;
    double k_f = 0.0;
    double k_g = 0.0;
    double k_g_bar = 0.0;
    double threshold = 0.0;       // k_f + (k_g^2 - 2 k_g_bar^2)/2
    double c2 = 0.0;              // 2 k_f + k_g^2 - 2 sigma lambda2
    double c3 = 0.0;              // 4 k_g_bar^2
    bool satisfied = false;       // sigma * lambda2 > threshold (strict)
    double guaranteed_rate = 0.0; // (c3 - 2 c2)/2 when satisfied, else 0
    ConstantsProvenance constants_provenance = ConstantsProvenance::analytic;
};

// Pure arithmetic form; checks that the threshold comparison agrees with
// the equivalent c3 > 2 c2 trigger.
SyncCertificate make_certificate(double lambda2, double sigma,
                                 const ModelConstants& constants);

// Spectral form. Refuses independent-noise models (NotApplicableError):
// the sufficient condition hinges on every node sharing one Brownian path.
SyncCertificate certificate(const Graph& g, const NodeModel& m, double sigma,
                            const ModelConstants& constants);

// Smallest sigma_n for which the bistable(r, sigma_n) network with unit
// coupling satisfies the certificate: sqrt(2 max(0, r - lambda2)).
double decision_threshold_sigma_n(const Graph& g, double r);

struct X0Spec {
    enum class Kind { normal, explicit_values };
    Kind kind = Kind::normal;
    double mean = 0.0;   // normal
    double stddev = 1.0; // normal
    std::uint64_t seed = 0;
    std::vector<double> values; // explicit_values, length N*n
};

// Initial condition for one replicate; normal draws use a per-replicate
// seed derived from (spec.seed, replicate), independent of Brownian seeds.
std::vector<double> sample_x0(const X0Spec& spec, int node_count, int node_dim,
                              std::uint64_t replicate);

struct McOptions {
    double window_fraction = 0.5;
    double floor = 1e-12;
    double sync_tol_rel = 1e-6; // terminal |e(T)| <= tol * |e(0)| counts as synced
    int threads = 0;            // 0 = STOCHSYNC_THREADS env or hardware threads
};

struct ReplicateResult {
    std::uint64_t brownian_seed = 0;
    std::uint64_t x0_seed = 0; // 0 for explicit initial conditions
    ExponentEstimate estimate;
    bool estimate_valid = false; // false when the tail fit had too few points
    double initial_error = 0.0;
    double terminal_error = 0.0;
    bool blew_up = false;
    bool synced = false;
};

struct McSummary {
    std::vector<ReplicateResult> replicates;
    double fraction_synced = 0.0;
    double median_exponent = 0.0; // NaN when no replicate produced a fit
    std::int64_t valid_estimates = 0;
    std::int64_t blowup_count = 0;
    bool has_certificate = false; // analytic constants + common noise only
    SyncCertificate cert;
};

// Replicate rho integrates with Brownian seed derived from (cfg.seed, rho)
// and an independently derived x0. A replicate counts as synced when its
// tail exponent is negative with r_squared >= 0.5, or when the terminal
// error has collapsed below sync_tol_rel * |e(0)|. Blow-ups are flagged
// per replicate and never abort the batch. Results are independent of the
// number of worker threads.
McSummary monte_carlo_verdict(const Graph& g, const NodeModel& m, double sigma,
                              const SimConfig& cfg, std::int64_t replicates,
                              const X0Spec& x0, const McOptions& opts = {});

// STOCHSYNC_THREADS env var, else `requested` when >= 1, else hardware
// concurrency.
int resolve_thread_count(int requested);

// Median of a list (average of the middle two for even sizes); NaN when
// empty.
double median(std::vector<double> values);

} // namespace stochsync

#endif
