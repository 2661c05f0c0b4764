#include "core/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace stochsync {

namespace {

void require_finite(double t, std::span<const double> x, const char* where) {
    if (!std::isfinite(t))
        throw ValidationError(std::string(where) + ": non-finite time");
    for (double v : x)
        if (!std::isfinite(v))
            throw ValidationError(std::string(where) + ": non-finite state");
}

void require_size(std::span<const double> x, std::span<double> out, int dim,
                  const char* where) {
    if (static_cast<int>(x.size()) != dim || static_cast<int>(out.size()) != dim)
        throw ValidationError(std::string(where) + ": state size " +
                              std::to_string(x.size()) + " does not match model dim " +
                              std::to_string(dim));
}

std::string format_label(const char* fmt, double a, double b) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), fmt, a, b);
    return buf;
}

void require_finite_matrix(const Matrix& m, const char* what) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (!std::isfinite(m(i, j)))
                throw ValidationError(std::string(what) + " has non-finite entries");
}

} // namespace

NodeModel NodeModel::bistable(double r, double sigma_n) {
    if (!std::isfinite(r) || !std::isfinite(sigma_n))
        throw ValidationError("bistable: parameters must be finite");
    if (sigma_n < 0.0)
        throw ValidationError("bistable: sigma_n must be >= 0");
    NodeModel m;
    m.dim_ = 1;
    m.kind_ = ModelKind::bistable;
    m.noise_mode_ = NoiseMode::common;
    m.r_ = r;
    m.sigma_n_ = sigma_n;
    m.label_ = format_label("bistable(r=%g, sigma_n=%g)", r, sigma_n);
    m.drift_ = [r](double, std::span<const double> x, std::span<double> out) {
        out[0] = r * x[0] - x[0] * x[0] * x[0];
    };
    m.diffusion_ = [sigma_n](double, std::span<const double> x,
                             std::span<double> out) { out[0] = sigma_n * x[0]; };
    return m;
}

NodeModel NodeModel::integrator() {
    NodeModel m;
    m.dim_ = 1;
    m.kind_ = ModelKind::integrator;
    m.noise_mode_ = NoiseMode::common;
    m.label_ = "integrator";
    m.drift_ = [](double, std::span<const double>, std::span<double> out) {
        out[0] = 0.0;
    };
    m.diffusion_ = [](double, std::span<const double>, std::span<double> out) {
        out[0] = 0.0;
    };
    return m;
}

NodeModel NodeModel::linear(const Matrix& drift, const Matrix& diffusion) {
    if (drift.rows() != drift.cols() || diffusion.rows() != diffusion.cols())
        throw ValidationError("linear: drift and diffusion matrices must be square");
    if (drift.rows() != diffusion.rows())
        throw ValidationError("linear: drift and diffusion dimensions differ");
    if (drift.rows() < 1)
        throw ValidationError("linear: dimension must be >= 1");
    require_finite_matrix(drift, "linear: drift matrix");
    require_finite_matrix(diffusion, "linear: diffusion matrix");
    NodeModel m;
    m.dim_ = drift.rows();
    m.kind_ = ModelKind::linear;
    m.noise_mode_ = NoiseMode::common;
    m.drift_matrix_ = drift;
    m.diffusion_matrix_ = diffusion;
    m.label_ = "linear(n=" + std::to_string(drift.rows()) + ")";
    m.drift_ = [a = m.drift_matrix_](double, std::span<const double> x,
                                     std::span<double> out) { matvec(a, x, out); };
    m.diffusion_ = [g = m.diffusion_matrix_](double, std::span<const double> x,
                                             std::span<double> out) {
        matvec(g, x, out);
    };
    return m;
}

NodeModel NodeModel::ddm(double beta, double sigma_b) {
    if (!std::isfinite(beta) || !std::isfinite(sigma_b))
        throw ValidationError("ddm: parameters must be finite");
    if (sigma_b < 0.0)
        throw ValidationError("ddm: sigma_b must be >= 0");
    NodeModel m;
    m.dim_ = 1;
    m.kind_ = ModelKind::ddm;
    m.noise_mode_ = NoiseMode::independent;
    m.beta_ = beta;
    m.sigma_b_ = sigma_b;
    m.label_ = format_label("ddm(beta=%g, sigma_b=%g)", beta, sigma_b);
    m.drift_ = [beta](double, std::span<const double>, std::span<double> out) {
        out[0] = beta;
    };
    m.diffusion_ = [sigma_b](double, std::span<const double>,
                             std::span<double> out) { out[0] = sigma_b; };
    return m;
}

NodeModel NodeModel::custom(int dim, DriftFn drift, DiffusionMatrixFn diffusion,
                            NoiseMode mode, std::string label) {
    if (dim < 1)
        throw ValidationError("custom: dimension must be >= 1");
    if (!drift || !diffusion)
        throw ValidationError("custom: drift and diffusion callbacks are required");
    NodeModel m;
    m.dim_ = dim;
    m.kind_ = ModelKind::custom;
    m.noise_mode_ = mode;
    m.label_ = label.empty() ? "custom(n=" + std::to_string(dim) + ")"
                             : std::move(label);
    m.drift_ = std::move(drift);
    m.diffusion_ = [dim, fn = std::move(diffusion)](double t,
                                                    std::span<const double> x,
                                                    std::span<double> out) {
        Matrix mg = fn(t);
        if (mg.rows() != dim || mg.cols() != dim)
            throw ValidationError("custom: diffusion matrix has wrong shape");
        matvec(mg, x, out);
    };
    return m;
}

NodeModel NodeModel::with_noise_mode(NoiseMode mode) const {
    NodeModel m = *this;
    m.noise_mode_ = mode;
    return m;
}

void NodeModel::drift(double t, std::span<const double> x,
                      std::span<double> out) const {
    require_size(x, out, dim_, "drift");
    require_finite(t, x, "drift");
    drift_(t, x, out);
}

void NodeModel::diffusion(double t, std::span<const double> x,
                          std::span<double> out) const {
    require_size(x, out, dim_, "diffusion");
    require_finite(t, x, "diffusion");
    diffusion_(t, x, out);
}

double NodeModel::scalar_param(const std::string& name) const {
    if (name == "r") return r_;
    if (name == "sigma_n") return sigma_n_;
    if (name == "beta") return beta_;
    if (name == "sigma_b") return sigma_b_;
    return 0.0;
}

ModelConstants analytic_constants(const NodeModel& m) {
    ModelConstants c;
    c.provenance = ConstantsProvenance::analytic;
    switch (m.kind()) {
    case ModelKind::bistable:
        // (x-y)(f(x)-f(y)) = (x-y)^2 (r - x^2 - xy - y^2) <= r (x-y)^2,
        // attained as x,y -> 0; the diffusion is exactly sigma_n (x-y).
        c.k_f = m.scalar_param("r");
        c.k_g = m.scalar_param("sigma_n");
        c.k_g_bar = c.k_g;
        return c;
    case ModelKind::integrator:
        return c; // zero drift, zero diffusion
    case ModelKind::ddm:
        // Constant drift and additive diffusion: all difference ratios vanish.
        return c;
    case ModelKind::linear: {
        const Matrix& a = m.drift_matrix();
        const Matrix& g = m.diffusion_matrix();
        std::vector<double> sym_spec = symmetric_eigenvalues(a.symmetric_part());
        c.k_f = sym_spec.back();
        if (!g.is_symmetric(1e-12))
            throw UnsupportedModelError(
                "linear: closed-form constants need a symmetric diffusion "
                "matrix; use estimate_constants");
        std::vector<double> gspec = symmetric_eigenvalues(g);
        if (gspec.front() < -1e-12 * std::max(1.0, std::abs(gspec.back())))
            throw UnsupportedModelError(
                "linear: closed-form constants need a positive semidefinite "
                "diffusion matrix; use estimate_constants");
        c.k_g = std::max(0.0, gspec.back());
        c.k_g_bar = std::max(0.0, gspec.front());
        return c;
    }
    case ModelKind::custom:
        break;
    }
    throw UnsupportedModelError(
        "no closed-form constants for model '" + m.label() +
        "'; use estimate_constants");
}

ModelConstants estimate_constants(const NodeModel& m,
                                  std::span<const double> box_lo,
                                  std::span<const double> box_hi,
                                  std::int64_t pair_count, std::uint64_t seed,
                                  const EstimateOptions& opts) {
    const int n = m.dim();
    if (static_cast<int>(box_lo.size()) != n ||
        static_cast<int>(box_hi.size()) != n)
        throw ValidationError("estimate_constants: box size does not match model dim");
    double diam2 = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!std::isfinite(box_lo[i]) || !std::isfinite(box_hi[i]))
            throw ValidationError("estimate_constants: box bounds must be finite");
        if (!(box_lo[i] < box_hi[i]))
            throw ValidationError("estimate_constants: box is degenerate in dim " +
                                  std::to_string(i));
        diam2 += (box_hi[i] - box_lo[i]) * (box_hi[i] - box_lo[i]);
    }
    if (pair_count < 2)
        throw ValidationError("estimate_constants: need at least 2 sample pairs");
    if (opts.time_grid.empty())
        throw ValidationError("estimate_constants: time grid must be non-empty");
    for (double t : opts.time_grid)
        if (!std::isfinite(t))
            throw ValidationError("estimate_constants: time grid must be finite");

    std::mt19937_64 engine(rng::derive_seed(seed, rng::Stream::constants, 0));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick_t(0,
                                                      opts.time_grid.size() - 1);

    std::vector<double> x(n), y(n), fx(n), fy(n), gx(n), gy(n);
    double k_f = -std::numeric_limits<double>::infinity();
    double k_g = 0.0;
    double k_g_bar = std::numeric_limits<double>::infinity();
    // Pairs closer than this are 0/0 noise, not information.
    const double min_d2 = 1e-18 * diam2;
    std::int64_t used = 0;

    for (std::int64_t p = 0; p < pair_count; ++p) {
        for (int i = 0; i < n; ++i)
            x[i] = box_lo[i] + (box_hi[i] - box_lo[i]) * unit(engine);
        for (int i = 0; i < n; ++i)
            y[i] = box_lo[i] + (box_hi[i] - box_lo[i]) * unit(engine);
        double t = opts.time_grid.size() > 1 ? opts.time_grid[pick_t(engine)]
                                             : opts.time_grid[0];
        double d2 = 0.0;
        for (int i = 0; i < n; ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
        if (d2 <= min_d2) continue;

        m.drift_raw(t, x, fx);
        m.drift_raw(t, y, fy);
        m.diffusion_raw(t, x, gx);
        m.diffusion_raw(t, y, gy);

        double quad = 0.0, gdiff2 = 0.0, persist = 0.0;
        for (int i = 0; i < n; ++i) {
            double d = x[i] - y[i];
            double gd = gx[i] - gy[i];
            quad += d * (fx[i] - fy[i]);
            gdiff2 += gd * gd;
            persist += d * gd;
        }
        k_f = std::max(k_f, quad / d2);
        k_g = std::max(k_g, std::sqrt(gdiff2 / d2));
        k_g_bar = std::min(k_g_bar, std::abs(persist) / d2);
        ++used;
    }

    if (used < 2)
        throw InsufficientDataError(
            "estimate_constants: fewer than 2 usable sample pairs");

    ModelConstants c;
    c.k_f = k_f;
    c.k_g = k_g;
    c.k_g_bar = std::min(k_g_bar, k_g); // Cauchy-Schwarz, up to rounding
    c.provenance = ConstantsProvenance::sampled;
    return c;
}

} // namespace stochsync
