// CSV/JSON serialization of trajectories, error series, certificates and
// Monte Carlo summaries. CSV floats carry 17 significant digits so files
// round-trip doubles exactly; JSON uses the library's shortest round-trip
// encoding, with non-finite values rendered as null.

#ifndef STOCHSYNC_CORE_IO_HPP
#define STOCHSYNC_CORE_IO_HPP

#include <string>
#include <vector>

#include "json.hpp"

#include "core/analysis.hpp"
#include "core/graph.hpp"
#include "core/sde.hpp"

namespace stochsync::io {

std::string format_double(double v); // printf %.17g

void ensure_directory(const std::string& dir);
void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// Header t,x_0_0,...,x_{N-1}_{n-1}; one recorded step per row.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

// Header t,e_norm,e_0_0,...,e_{N-1}_{n-1}.
void write_error_csv(const std::string& path, const SyncErrorSeries& err);

// Header t,g_0_0,...: the model diffusion evaluated along the trajectory.
void write_noise_series_csv(const std::string& path, const Trajectory& traj,
                            const NodeModel& m);

// Header replicate,exponent,r_squared,floored; replicates without a valid
// tail fit carry nan columns.
void write_exponents_csv(const std::string& path, const McSummary& summary);

struct SweepRow {
    double value = 0.0;
    double fraction_synced = 0.0;
    double median_exponent = 0.0;
    int cert_satisfied = -1; // 1 true, 0 false, -1 not applicable
};

// Header value,fraction_synced,median_exponent,cert_satisfied; the last
// column prints true/false/na.
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

nlohmann::ordered_json certificate_json(const SyncCertificate& cert);
nlohmann::ordered_json exponent_json(const ExponentEstimate& est);
nlohmann::ordered_json summary_json(const McSummary& summary);
nlohmann::ordered_json spectral_json(const Graph& g, const SpectralInfo& info);

} // namespace stochsync::io

#endif
