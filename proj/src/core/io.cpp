#include "core/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "core/errors.hpp"

namespace stochsync::io {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ensure_directory(const std::string& dir) {
    if (dir.empty()) return;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw IoError("read from '" + path + "' failed");
    return buf.str();
}

namespace {

// State-style column names: prefix_i_d for node i, coordinate d.
void append_state_header(std::string& line, const char* prefix, int node_count,
                         int node_dim) {
    for (int i = 0; i < node_count; ++i)
        for (int d = 0; d < node_dim; ++d) {
            line += ',';
            line += prefix;
            line += '_';
            line += std::to_string(i);
            line += '_';
            line += std::to_string(d);
        }
}

} // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::string out;
    out.reserve(traj.rows() * (traj.states.size() / std::max<std::size_t>(traj.rows(), 1) + 1) * 26 + 64);
    std::string header = "t";
    append_state_header(header, "x", traj.node_count, traj.node_dim);
    out += header;
    out += '\n';
    const std::size_t width =
        static_cast<std::size_t>(traj.node_count) * traj.node_dim;
    for (std::size_t r = 0; r < traj.rows(); ++r) {
        out += format_double(traj.times[r]);
        const double* row = traj.states.data() + r * width;
        for (std::size_t c = 0; c < width; ++c) {
            out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    write_text(path, out);
}

void write_error_csv(const std::string& path, const SyncErrorSeries& err) {
    std::string out = "t,e_norm";
    append_state_header(out, "e", err.node_count, err.node_dim);
    out += '\n';
    const std::size_t width =
        static_cast<std::size_t>(err.node_count) * err.node_dim;
    for (std::size_t r = 0; r < err.times.size(); ++r) {
        out += format_double(err.times[r]);
        out += ',';
        out += format_double(err.total_norm[r]);
        const double* row = err.error.data() + r * width;
        for (std::size_t c = 0; c < width; ++c) {
            out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    write_text(path, out);
}

void write_noise_series_csv(const std::string& path, const Trajectory& traj,
                            const NodeModel& m) {
    const int N = traj.node_count;
    const int n = traj.node_dim;
    std::string out = "t";
    append_state_header(out, "g", N, n);
    out += '\n';
    std::vector<double> gi(n);
    for (std::size_t r = 0; r < traj.rows(); ++r) {
        out += format_double(traj.times[r]);
        std::span<const double> x = traj.state(r);
        for (int i = 0; i < N; ++i) {
            m.diffusion_raw(traj.times[r], x.subspan(static_cast<std::size_t>(i) * n, n), gi);
            for (int d = 0; d < n; ++d) {
                out += ',';
                out += format_double(gi[d]);
            }
        }
        out += '\n';
    }
    write_text(path, out);
}

void write_exponents_csv(const std::string& path, const McSummary& summary) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::string out = "replicate,exponent,r_squared,floored\n";
    for (std::size_t i = 0; i < summary.replicates.size(); ++i) {
        const ReplicateResult& r = summary.replicates[i];
        out += std::to_string(i);
        out += ',';
        out += format_double(r.estimate_valid ? r.estimate.exponent : nan);
        out += ',';
        out += format_double(r.estimate_valid ? r.estimate.r_squared : nan);
        out += ',';
        out += r.estimate_valid && r.estimate.floored ? "true" : "false";
        out += '\n';
    }
    write_text(path, out);
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::string out = "value,fraction_synced,median_exponent,cert_satisfied\n";
    for (const SweepRow& r : rows) {
        out += format_double(r.value);
        out += ',';
        out += format_double(r.fraction_synced);
        out += ',';
        out += format_double(r.median_exponent);
        out += ',';
        out += r.cert_satisfied < 0 ? "na" : (r.cert_satisfied ? "true" : "false");
        out += '\n';
    }
    write_text(path, out);
}

nlohmann::ordered_json certificate_json(const SyncCertificate& cert) {
    ordered_json j;
    j["lambda2"] = cert.lambda2;
    j["sigma"] = cert.sigma;
    j["k_f"] = cert.k_f;
    j["k_g"] = cert.k_g;
    j["k_g_bar"] = cert.k_g_bar;
    j["threshold"] = cert.threshold;
    j["c2"] = cert.c2;
    j["c3"] = cert.c3;
    j["satisfied"] = cert.satisfied;
    j["guaranteed_rate"] = cert.guaranteed_rate;
    j["constants_provenance"] =
        cert.constants_provenance == ConstantsProvenance::analytic ? "analytic"
                                                                   : "sampled";
    return j;
}

nlohmann::ordered_json exponent_json(const ExponentEstimate& est) {
    ordered_json j;
    j["exponent"] = est.exponent;
    j["r_squared"] = est.r_squared;
    j["window"] = {est.window_start, est.window_end};
    j["floored"] = est.floored;
    j["points_used"] = est.points_used;
    return j;
}

nlohmann::ordered_json summary_json(const McSummary& summary) {
    ordered_json j;
    j["replicates"] = summary.replicates.size();
    j["fraction_synced"] = summary.fraction_synced;
    j["median_exponent"] = summary.median_exponent;
    j["valid_estimates"] = summary.valid_estimates;
    j["blowup_count"] = summary.blowup_count;
    j["certificate"] =
        summary.has_certificate ? certificate_json(summary.cert) : ordered_json();
    ordered_json reps = ordered_json::array();
    for (std::size_t i = 0; i < summary.replicates.size(); ++i) {
        const ReplicateResult& r = summary.replicates[i];
        ordered_json jr;
        jr["replicate"] = i;
        jr["brownian_seed"] = r.brownian_seed;
        jr["x0_seed"] = r.x0_seed;
        jr["synced"] = r.synced;
        jr["blew_up"] = r.blew_up;
        jr["initial_error"] = r.initial_error;
        jr["terminal_error"] = r.terminal_error;
        jr["estimate"] = r.estimate_valid ? exponent_json(r.estimate) : ordered_json();
        reps.push_back(std::move(jr));
    }
    j["replicate_results"] = std::move(reps);
    return j;
}

nlohmann::ordered_json spectral_json(const Graph& g, const SpectralInfo& info) {
    ordered_json j;
    j["graph"] = g.description();
    j["nodes"] = g.node_count();
    j["edge_count"] = g.edges().size();
    j["eigenvalues"] = info.eigenvalues;
    j["lambda2"] = info.lambda2;
    j["connected"] = info.connected;
    j["zero_tolerance"] = info.zero_tolerance;
    return j;
}

} // namespace stochsync::io
