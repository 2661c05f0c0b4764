// Node dynamics: drift f(t,x) plus a diffusion map, together with the
// constants (k_f, k_g, k_g_bar) that feed the synchronization certificate.
//
// Built-in diffusions are linear in the state, g(t,x) = M_g(t) x, so the
// zero error solution is preserved under common noise. The coupled
// decision (ddm) model is the one exception: its noise is additive and
// per-node independent, and the certificate path refuses it.

#ifndef STOCHSYNC_CORE_MODEL_HPP
#define STOCHSYNC_CORE_MODEL_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "core/linalg.hpp"

namespace stochsync {

enum class NoiseMode { common, independent };
enum class ModelKind { bistable, integrator, linear, ddm, custom };
enum class ConstantsProvenance { analytic, sampled };

struct ModelConstants {
    double k_f = 0.0;     // one-sided (QUAD) drift constant
    double k_g = 0.0;     // diffusion Lipschitz constant, >= 0
    double k_g_bar = 0.0; // diffusion persistence constant, >= 0, <= k_g
    ConstantsProvenance provenance = ConstantsProvenance::analytic;
};

class NodeModel {
public:
    using DriftFn =
        std::function<void(double, std::span<const double>, std::span<double>)>;
    using DiffusionMatrixFn = std::function<Matrix(double)>;

    static NodeModel bistable(double r, double sigma_n);
    static NodeModel integrator();
    static NodeModel linear(const Matrix& drift, const Matrix& diffusion);
    static NodeModel ddm(double beta, double sigma_b);
    // State-linear custom dynamics; constants must come from
    // estimate_constants.
    static NodeModel custom(int dim, DriftFn drift, DiffusionMatrixFn diffusion,
                            NoiseMode mode, std::string label);

    int dim() const { return dim_; }
    ModelKind kind() const { return kind_; }
    NoiseMode noise_mode() const { return noise_mode_; }
    const std::string& label() const { return label_; }

    NodeModel with_noise_mode(NoiseMode mode) const;

    // f(t,x). Throws ValidationError on non-finite input.
    void drift(double t, std::span<const double> x, std::span<double> out) const;
    // g(t,x). Throws ValidationError on non-finite input.
    void diffusion(double t, std::span<const double> x,
                   std::span<double> out) const;

    // Hot-path variants without the finiteness check.
    void drift_raw(double t, std::span<const double> x,
                   std::span<double> out) const {
        drift_(t, x, out);
    }
    void diffusion_raw(double t, std::span<const double> x,
                       std::span<double> out) const {
        diffusion_(t, x, out);
    }

    // Named scalar parameters (r, sigma_n, beta, sigma_b); 0 when absent.
    double scalar_param(const std::string& name) const;

    const Matrix& drift_matrix() const { return drift_matrix_; }
    const Matrix& diffusion_matrix() const { return diffusion_matrix_; }

private:
    NodeModel() = default;

    int dim_ = 1;
    ModelKind kind_ = ModelKind::custom;
    NoiseMode noise_mode_ = NoiseMode::common;
    std::string label_;
    DriftFn drift_;
    DriftFn diffusion_;
    double r_ = 0.0;
    double sigma_n_ = 0.0;
    double beta_ = 0.0;
    double sigma_b_ = 0.0;
    Matrix drift_matrix_;     // linear kind
    Matrix diffusion_matrix_; // linear kind
};

// Closed-form constants for the built-ins. Throws UnsupportedModelError for
// custom models and for linear models whose diffusion matrix is not
// symmetric positive semidefinite (no closed form is offered there; use
// estimate_constants).
ModelConstants analytic_constants(const NodeModel& m);

struct EstimateOptions {
    std::vector<double> time_grid = {0.0}; // t values sampled per pair
};

// Sampled constants over an axis-aligned box: k_f and k_g are maxima and
// k_g_bar a minimum over `pair_count` uniform pairs, so they are a lower
// (resp. upper) bound on the true constants -- sampling cannot certify
// suprema. Deterministic for a fixed seed.
ModelConstants estimate_constants(const NodeModel& m,
                                  std::span<const double> box_lo,
                                  std::span<const double> box_hi,
                                  std::int64_t pair_count, std::uint64_t seed,
                                  const EstimateOptions& opts = {});

} // namespace stochsync

#endif
