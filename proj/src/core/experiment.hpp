// Config-file driven experiments: parse an INI-style config, build the
// graph/model it describes, and run the check / simulate / sweep /
// noise-series / lambda2 commands with CSV+JSON outputs.
//
// Config format (documented in README.md): `key = value` lines grouped
// under [graph] [model] [sim] [run] [x0] [sweep] sections, with a
// top-level `config_version = 1`. '#' starts a comment. Parse errors are
// reported as "file:line: message".

#ifndef STOCHSYNC_CORE_EXPERIMENT_HPP
#define STOCHSYNC_CORE_EXPERIMENT_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "core/analysis.hpp"
#include "core/graph.hpp"
#include "core/model.hpp"
#include "core/sde.hpp"

namespace stochsync {

enum class SweepParameter { none, sigma_n, sigma };

struct ExperimentConfig {
    // [graph]
    TopologyKind topology = TopologyKind::chain;
    int nodes = 0;
    double edge_probability = 0.0; // erdos_renyi
    std::uint64_t graph_seed = 0;  // erdos_renyi
    std::vector<Edge> edges;       // edge_list (inline or loaded from path)

    // [model]
    ModelKind model_kind = ModelKind::integrator;
    double r = 0.0, sigma_n = 0.0;   // bistable
    double beta = 0.0, sigma_b = 0.0; // ddm
    double lin_a = 0.0, lin_m = 0.0;  // scalar linear node
    bool noise_mode_overridden = false;
    NoiseMode noise_mode = NoiseMode::common;

    // [sim]
    SimConfig sim;

    // [run]
    double sigma = 0.0;
    std::int64_t replicates = 1;
    McOptions mc;
    std::string output_dir = "out";

    // [x0]
    bool has_x0 = false;
    X0Spec x0;

    // [sweep]
    SweepParameter sweep = SweepParameter::none;
    std::vector<double> sweep_values;
};

// `filename` is only used to anchor error messages.
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& filename);
ExperimentConfig load_config(const std::string& path);

// Fully resolved config (defaults materialized, numbers at 17 significant
// digits, edge-list files inlined) that reparses to an equivalent config;
// echoed into run.json so any run can be reproduced byte-for-byte.
std::string canonical_config_text(const ExperimentConfig& cfg);

Graph build_graph(const ExperimentConfig& cfg);
NodeModel build_model(const ExperimentConfig& cfg);

// Commands write their artifacts under cfg.output_dir and, when `out` is
// non-null, print a human-readable summary (JSON for check/lambda2) to it.
// Failures are reported by exception: ParseError/ValidationError/IoError
// for bad configs or environments, NotApplicableError where the spec of
// the command does not cover the configured model.
void cmd_check(const ExperimentConfig& cfg, std::ostream* out);
void cmd_simulate(const ExperimentConfig& cfg, std::ostream* out);
void cmd_sweep(const ExperimentConfig& cfg, std::ostream* out);
void cmd_noise_series(const ExperimentConfig& cfg, std::ostream* out);
void cmd_lambda2(const ExperimentConfig& cfg, std::ostream* out);

} // namespace stochsync

#endif
