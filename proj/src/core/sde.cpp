#include "core/sde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace stochsync {

std::vector<double> BrownianPath::terminal_values() const {
    std::vector<double> b(channels, 0.0);
    for (std::int64_t k = 0; k < steps; ++k)
        for (int c = 0; c < channels; ++c)
            b[c] += increments[static_cast<std::size_t>(k) * channels + c];
    return b;
}

BrownianPath brownian_path(std::uint64_t seed, std::int64_t steps, double dt,
                           NoiseMode mode, int node_count) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ValidationError("brownian_path: dt must be positive and finite");
    if (steps < 1)
        throw ValidationError("brownian_path: steps must be >= 1");
    if (node_count < 1)
        throw ValidationError("brownian_path: node_count must be >= 1");

    BrownianPath path;
    path.dt = dt;
    path.steps = steps;
    path.mode = mode;
    path.seed = seed;
    path.channels = mode == NoiseMode::common ? 1 : node_count;
    path.increments.resize(static_cast<std::size_t>(steps) * path.channels);
    const double sqrt_dt = std::sqrt(dt);
    for (int c = 0; c < path.channels; ++c) {
        rng::GaussianStream gs(rng::derive_seed(seed, rng::Stream::brownian,
                                                static_cast<std::uint64_t>(c)));
        for (std::int64_t k = 0; k < steps; ++k)
            path.increments[static_cast<std::size_t>(k) * path.channels + c] =
                gs.next(0.0, sqrt_dt);
    }
    return path;
}

std::int64_t step_count(double horizon, double dt) {
    // Nudge before truncating so horizon = m*dt up to rounding gives m steps.
    return static_cast<std::int64_t>(std::floor(horizon / dt + 1e-9));
}

void validate_sim_config(const SimConfig& cfg) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
        throw ValidationError("sim: dt must be positive and finite");
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon))
        throw ValidationError("sim: horizon must be positive and finite");
    if (cfg.dt > cfg.horizon || step_count(cfg.horizon, cfg.dt) < 2)
        throw ValidationError("sim: horizon must cover at least two steps of dt");
    if (cfg.record_stride < 1)
        throw ValidationError("sim: record_stride must be >= 1");
    if (!(cfg.blowup_threshold > 0.0))
        throw ValidationError("sim: blowup_threshold must be positive");
}

std::vector<double> gaussian_initial_condition(std::uint64_t seed, int node_count,
                                               int node_dim, double mean,
                                               double stddev) {
    if (node_count < 1 || node_dim < 1)
        throw ValidationError("initial condition: node_count and node_dim must be >= 1");
    if (!std::isfinite(mean) || !std::isfinite(stddev) || stddev < 0.0)
        throw ValidationError("initial condition: mean/stddev must be finite, stddev >= 0");
    rng::GaussianStream gs(
        rng::derive_seed(seed, rng::Stream::initial_condition, 0));
    std::vector<double> x0(static_cast<std::size_t>(node_count) * node_dim);
    for (double& v : x0) v = gs.next(mean, stddev);
    return x0;
}

Trajectory integrate(const Graph& g, const NodeModel& m, double coupling,
                     std::span<const double> x0, const SimConfig& cfg) {
    const int N = g.node_count();
    const int n = m.dim();
    const std::size_t width = static_cast<std::size_t>(N) * n;
    if (x0.size() != width)
        throw ValidationError("integrate: x0 has " + std::to_string(x0.size()) +
                              " entries, expected " + std::to_string(width));
    for (double v : x0)
        if (!std::isfinite(v))
            throw ValidationError("integrate: x0 must be finite");
    if (!std::isfinite(coupling) || coupling < 0.0)
        throw ValidationError("integrate: coupling must be finite and >= 0");
    validate_sim_config(cfg);

    const std::int64_t steps = step_count(cfg.horizon, cfg.dt);
    const bool common_noise = m.noise_mode() == NoiseMode::common;
    const BrownianPath path =
        brownian_path(cfg.seed, steps, cfg.dt, m.noise_mode(), N);
    const auto& nbrs = g.neighbors();
    const double dt = cfg.dt;
    const bool tamed = cfg.scheme == Scheme::tamed_euler;

    Trajectory traj;
    traj.node_count = N;
    traj.node_dim = n;
    traj.config = cfg;
    traj.model_label = m.label();
    traj.graph_description = g.description();
    const std::size_t expected_rows =
        static_cast<std::size_t>(steps / cfg.record_stride) + 2;
    traj.times.reserve(expected_rows);
    traj.states.reserve(expected_rows * width);

    std::vector<double> cur(x0.begin(), x0.end());
    std::vector<double> nxt(width);
    std::vector<double> fi(n), gi(n), di(n);

    auto record = [&](double t, const std::vector<double>& state) {
        traj.times.push_back(t);
        traj.states.insert(traj.states.end(), state.begin(), state.end());
    };
    record(0.0, cur);

    for (std::int64_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        for (int i = 0; i < N; ++i) {
            const double* xi = cur.data() + static_cast<std::size_t>(i) * n;
            std::span<const double> xs(xi, static_cast<std::size_t>(n));
            m.drift_raw(t, xs, fi);
            m.diffusion_raw(t, xs, gi);
            for (int d = 0; d < n; ++d) {
                double c = 0.0;
                for (int j : nbrs[i])
                    c += cur[static_cast<std::size_t>(j) * n + d] - xi[d];
                di[d] = fi[d] + coupling * c;
            }
            double scale = dt;
            if (tamed) {
                double norm = 0.0;
                for (int d = 0; d < n; ++d) norm += di[d] * di[d];
                scale = dt / (1.0 + dt * std::sqrt(norm));
            }
            const double db = path.increment(k, common_noise ? 0 : i);
            double* out = nxt.data() + static_cast<std::size_t>(i) * n;
            for (int d = 0; d < n; ++d)
                out[d] = xi[d] + scale * di[d] + gi[d] * db;
        }

        double max_abs = 0.0;
        for (double v : nxt) max_abs = std::max(max_abs, std::abs(v));
        const double t_next = static_cast<double>(k + 1) * dt;
        if (!(max_abs <= cfg.blowup_threshold)) { // also catches NaN
            traj.blew_up = true;
            traj.blowup_time = t_next;
            break;
        }
        cur.swap(nxt);
        if ((k + 1) % cfg.record_stride == 0 || k + 1 == steps)
            record(t_next, cur);
    }
    return traj;
}

} // namespace stochsync
