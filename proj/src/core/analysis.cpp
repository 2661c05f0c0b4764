#include "core/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace stochsync {

std::vector<double> mean_trajectory(const Trajectory& traj) {
    const int N = traj.node_count;
    const int n = traj.node_dim;
    const std::size_t rows = traj.rows();
    std::vector<double> means(rows * n, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        std::span<const double> x = traj.state(r);
        double* s = means.data() + r * n;
        for (int i = 0; i < N; ++i)
            for (int d = 0; d < n; ++d)
                s[d] += x[static_cast<std::size_t>(i) * n + d];
        for (int d = 0; d < n; ++d) s[d] /= N;
    }
    return means;
}

SyncErrorSeries sync_error(const Trajectory& traj) {
    const int N = traj.node_count;
    const int n = traj.node_dim;
    const std::size_t rows = traj.rows();
    const std::size_t width = static_cast<std::size_t>(N) * n;
    std::vector<double> means = mean_trajectory(traj);

    SyncErrorSeries s;
    s.node_count = N;
    s.node_dim = n;
    s.times = traj.times;
    s.error.resize(rows * width);
    s.total_norm.resize(rows);
    s.node_norm.resize(rows * N);
    for (std::size_t r = 0; r < rows; ++r) {
        std::span<const double> x = traj.state(r);
        const double* mean = means.data() + r * n;
        double* e = s.error.data() + r * width;
        double total = 0.0;
        for (int i = 0; i < N; ++i) {
            double node = 0.0;
            for (int d = 0; d < n; ++d) {
                double v = x[static_cast<std::size_t>(i) * n + d] - mean[d];
                e[static_cast<std::size_t>(i) * n + d] = v;
                node += v * v;
            }
            s.node_norm[r * N + i] = std::sqrt(node);
            total += node;
        }
        s.total_norm[r] = std::sqrt(total);
    }
    return s;
}

ExponentEstimate lyapunov_exponent(std::span<const double> times,
                                   std::span<const double> values,
                                   double window_fraction, double floor) {
    if (times.size() != values.size())
        throw ValidationError("lyapunov_exponent: times/values size mismatch");
    if (!(window_fraction > 0.0) || !(window_fraction <= 0.8))
        throw ValidationError(
            "lyapunov_exponent: window_fraction must lie in (0, 0.8]");
    if (!(floor > 0.0) || !std::isfinite(floor))
        throw ValidationError("lyapunov_exponent: floor must be positive");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw ValidationError("lyapunov_exponent: times must be increasing");
    if (times.size() < 2)
        throw InsufficientDataError("lyapunov_exponent: series too short");

    const double t0 = times.front();
    const double t_end = times.back();
    const double t_start = t_end - window_fraction * (t_end - t0);

    ExponentEstimate est;
    est.window_start = t_start;
    est.window_end = t_end;

    // Points at or after t_start, stopping at the first floor crossing
    // anywhere in the series.
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    std::int64_t count = 0;
    double first_t = t_start, last_t = t_start;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (values[i] <= floor) {
            est.floored = true;
            break;
        }
        if (times[i] < t_start) continue;
        const double x = times[i];
        const double y = std::log(values[i]);
        if (count == 0) first_t = x;
        last_t = x;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++count;
    }
    if (count < 10)
        throw InsufficientDataError(
            "lyapunov_exponent: only " + std::to_string(count) +
            " usable points in the fit window (need 10)");

    const double nn = static_cast<double>(count);
    const double sxx_c = sxx - sx * sx / nn;
    const double sxy_c = sxy - sx * sy / nn;
    const double syy_c = syy - sy * sy / nn;
    est.exponent = sxy_c / sxx_c;
    if (syy_c > 0.0) {
        double r2 = (sxy_c * sxy_c) / (sxx_c * syy_c);
        est.r_squared = std::clamp(r2, 0.0, 1.0);
    } else {
        est.r_squared = 0.0; // flat series: no decay evidence
    }
    est.window_start = first_t;
    est.window_end = last_t;
    est.points_used = count;
    return est;
}

SyncCertificate make_certificate(double lambda2, double sigma,
                                 const ModelConstants& constants) {
    if (std::isnan(lambda2) || lambda2 < 0.0)
        throw ValidationError("certificate: lambda2 must be >= 0");
    if (!std::isfinite(sigma) || sigma < 0.0)
        throw ValidationError("certificate: sigma must be finite and >= 0");
    if (!std::isfinite(constants.k_f) || !std::isfinite(constants.k_g) ||
        !std::isfinite(constants.k_g_bar))
        throw ValidationError("certificate: constants must be finite");
    if (constants.k_g < 0.0 || constants.k_g_bar < 0.0 ||
        constants.k_g_bar > constants.k_g * (1.0 + 1e-12))
        throw ValidationError(
            "certificate: need 0 <= k_g_bar <= k_g (Cauchy-Schwarz)");

    SyncCertificate c;
    c.lambda2 = lambda2;
    c.sigma = sigma;
    c.k_f = constants.k_f;
    c.k_g = constants.k_g;
    c.k_g_bar = constants.k_g_bar;
    c.constants_provenance = constants.provenance;
    c.threshold =
        c.k_f + (c.k_g * c.k_g - 2.0 * c.k_g_bar * c.k_g_bar) / 2.0;
    c.c2 = 2.0 * c.k_f + c.k_g * c.k_g - 2.0 * sigma * lambda2;
    c.c3 = 4.0 * c.k_g_bar * c.k_g_bar;
    c.satisfied = sigma * lambda2 > c.threshold;

    // Same statement up to algebra; disagreement beyond rounding slack
    // means the arithmetic above is wrong.
    const bool trigger = c.c3 > 2.0 * c.c2;
    if (c.satisfied != trigger) {
        double scale = std::max({1.0, std::abs(c.c3), std::abs(2.0 * c.c2)});
        if (std::abs(c.c3 - 2.0 * c.c2) > 1e-9 * scale)
            throw Error("certificate: threshold and rate triggers disagree");
    }
    c.guaranteed_rate = c.satisfied ? (c.c3 - 2.0 * c.c2) / 2.0 : 0.0;
    return c;
}

SyncCertificate certificate(const Graph& g, const NodeModel& m, double sigma,
                            const ModelConstants& constants) {
    if (m.noise_mode() != NoiseMode::common)
        throw NotApplicableError(
            "certificate: model '" + m.label() +
            "' uses independent per-node noise; the sufficient condition "
            "only covers a Brownian path common to all nodes");
    SpectralInfo info = spectral_info(g);
    return make_certificate(info.lambda2, sigma, constants);
}

double decision_threshold_sigma_n(const Graph& g, double r) {
    if (!std::isfinite(r))
        throw ValidationError("decision_threshold_sigma_n: r must be finite");
    SpectralInfo info = spectral_info(g);
    double gap = r - info.lambda2;
    return gap > 0.0 ? std::sqrt(2.0 * gap) : 0.0;
}

std::vector<double> sample_x0(const X0Spec& spec, int node_count, int node_dim,
                              std::uint64_t replicate) {
    const std::size_t width =
        static_cast<std::size_t>(node_count) * node_dim;
    if (spec.kind == X0Spec::Kind::explicit_values) {
        if (spec.values.size() != width)
            throw ValidationError("x0: explicit vector has " +
                                  std::to_string(spec.values.size()) +
                                  " entries, expected " + std::to_string(width));
        return spec.values;
    }
    std::uint64_t seed =
        rng::derive_seed(spec.seed, rng::Stream::initial_condition, replicate);
    return gaussian_initial_condition(seed, node_count, node_dim, spec.mean,
                                      spec.stddev);
}

int resolve_thread_count(int requested) {
    if (const char* env = std::getenv("STOCHSYNC_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 4096)
            return static_cast<int>(v);
    }
    if (requested >= 1) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

double median(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

namespace {

void validate_mc_options(const McOptions& opts) {
    if (!(opts.window_fraction > 0.0) || !(opts.window_fraction <= 0.8))
        throw ValidationError("monte_carlo: window_fraction must lie in (0, 0.8]");
    if (!(opts.floor > 0.0) || !std::isfinite(opts.floor))
        throw ValidationError("monte_carlo: floor must be positive");
    if (!(opts.sync_tol_rel >= 0.0) || !std::isfinite(opts.sync_tol_rel))
        throw ValidationError("monte_carlo: sync_tol_rel must be >= 0");
}

} // namespace

McSummary monte_carlo_verdict(const Graph& g, const NodeModel& m, double sigma,
                              const SimConfig& cfg, std::int64_t replicates,
                              const X0Spec& x0, const McOptions& opts) {
    if (replicates < 1)
        throw ValidationError("monte_carlo: replicates must be >= 1");
    validate_sim_config(cfg);
    validate_mc_options(opts);
    if (x0.kind == X0Spec::Kind::normal &&
        (!std::isfinite(x0.mean) || !std::isfinite(x0.stddev) || x0.stddev < 0.0))
        throw ValidationError("monte_carlo: x0 mean/stddev must be finite, stddev >= 0");

    McSummary summary;
    summary.replicates.resize(static_cast<std::size_t>(replicates));
    if (m.noise_mode() == NoiseMode::common) {
        try {
            summary.cert = certificate(g, m, sigma, analytic_constants(m));
            summary.has_certificate = true;
        } catch (const UnsupportedModelError&) {
            // No closed-form constants; the verdict stays purely empirical.
        }
    }

    auto run_replicate = [&](std::int64_t rho) {
        ReplicateResult& res =
            summary.replicates[static_cast<std::size_t>(rho)];
        res.brownian_seed = rng::derive_seed(cfg.seed, rng::Stream::brownian,
                                             static_cast<std::uint64_t>(rho));
        res.x0_seed =
            x0.kind == X0Spec::Kind::normal
                ? rng::derive_seed(x0.seed, rng::Stream::initial_condition,
                                   static_cast<std::uint64_t>(rho))
                : 0;
        std::vector<double> init =
            sample_x0(x0, g.node_count(), m.dim(),
                      static_cast<std::uint64_t>(rho));
        SimConfig rc = cfg;
        rc.seed = res.brownian_seed;
        Trajectory traj = integrate(g, m, sigma, init, rc);
        res.blew_up = traj.blew_up;

        SyncErrorSeries err = sync_error(traj);
        res.initial_error = err.total_norm.front();
        res.terminal_error = err.total_norm.back();
        try {
            res.estimate = lyapunov_exponent(err.times, err.total_norm,
                                             opts.window_fraction, opts.floor);
            res.estimate_valid = true;
        } catch (const InsufficientDataError&) {
            res.estimate_valid = false;
        }
        bool decaying = res.estimate_valid && res.estimate.exponent < 0.0 &&
                        res.estimate.r_squared >= 0.5;
        bool collapsed =
            res.terminal_error <= opts.sync_tol_rel * res.initial_error;
        res.synced = !res.blew_up && (decaying || collapsed);
    };

    const int workers = std::min<std::int64_t>(
        resolve_thread_count(opts.threads), replicates);
    std::atomic<std::int64_t> next{0};
    std::exception_ptr first_error = nullptr;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            std::int64_t rho = next.fetch_add(1);
            if (rho >= replicates) return;
            try {
                run_replicate(rho);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<double> exponents;
    std::int64_t synced = 0;
    for (const ReplicateResult& r : summary.replicates) {
        if (r.synced) ++synced;
        if (r.blew_up) ++summary.blowup_count;
        if (r.estimate_valid) exponents.push_back(r.estimate.exponent);
    }
    summary.valid_estimates = static_cast<std::int64_t>(exponents.size());
    summary.fraction_synced =
        static_cast<double>(synced) / static_cast<double>(replicates);
    summary.median_exponent = median(std::move(exponents));
    return summary;
}

} // namespace stochsync
