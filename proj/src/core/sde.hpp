// Euler-Maruyama / tamed Euler integration of the coupled network SDE
//
//   dX_i = [ f(t, X_i) + sigma * sum_{j ~ i} (X_j - X_i) ] dt + g(t, X_i) db
//
// where b is a single scalar Brownian motion shared by every node in
// common-noise mode, or one independent scalar Brownian motion per node.

#ifndef STOCHSYNC_CORE_SDE_HPP
#define STOCHSYNC_CORE_SDE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/graph.hpp"
#include "core/model.hpp"

namespace stochsync {

enum class Scheme { euler_maruyama, tamed_euler };

struct SimConfig {
    double dt = 1e-3;
    double horizon = 1.0;           // must cover at least two steps
    std::uint64_t seed = 0;         // Brownian path seed
    Scheme scheme = Scheme::euler_maruyama;
    std::int64_t record_stride = 1; // keep every k-th step
    double blowup_threshold = 1e8;  // halt when max_i |x_i| exceeds this
};

void validate_sim_config(const SimConfig& cfg);

// Increments of the driving Brownian motion(s) on a uniform grid: one
// channel in common mode, node_count channels in independent mode, stored
// step-major (increments[k*channels + c] ~ N(0, dt)). Channel c is an
// independent stream derived from (seed, c), so adding nodes never
// reshuffles existing channels.
struct BrownianPath {
    double dt = 0.0;
    std::int64_t steps = 0;
    NoiseMode mode = NoiseMode::common;
    std::uint64_t seed = 0;
    int channels = 0;
    std::vector<double> increments;

    double increment(std::int64_t step, int channel) const {
        return increments[static_cast<std::size_t>(step) * channels + channel];
    }
    // b(steps * dt) per channel.
    std::vector<double> terminal_values() const;
};

BrownianPath brownian_path(std::uint64_t seed, std::int64_t steps, double dt,
                           NoiseMode mode, int node_count = 1);

struct Trajectory {
    int node_count = 0; // N
    int node_dim = 0;   // n
    std::vector<double> times;
    // times.size() rows of N*n doubles; node i occupies [i*n, (i+1)*n).
    std::vector<double> states;
    bool blew_up = false;
    double blowup_time = 0.0; // valid only when blew_up
    SimConfig config;
    std::string model_label;
    std::string graph_description;

    std::size_t rows() const { return times.size(); }
    std::span<const double> state(std::size_t row) const {
        std::size_t w = static_cast<std::size_t>(node_count) * node_dim;
        return {states.data() + row * w, w};
    }
};

// Number of integration steps covering `horizon` at step `dt`.
std::int64_t step_count(double horizon, double dt);

// Validates shapes and parameters, then integrates. On blow-up the
// trajectory holds everything recorded before the offending step and the
// blew_up/blowup_time fields are set; it never throws for blow-ups.
Trajectory integrate(const Graph& g, const NodeModel& m, double coupling,
                     std::span<const double> x0, const SimConfig& cfg);

// Initial condition helper: i.i.d. Normal(mean, stddev^2) entries across
// all N*n coordinates, seeded independently of the Brownian path.
std::vector<double> gaussian_initial_condition(std::uint64_t seed, int node_count,
                                               int node_dim, double mean,
                                               double stddev);

} // namespace stochsync

#endif
