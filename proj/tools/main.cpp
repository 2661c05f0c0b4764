// stochsync command-line front end. Talks to the shared library strictly
// through the public C API.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "stochsync/stochsync.h"

namespace {

int exit_code_for(ss_status status) {
    if (status == SS_OK) return 0;
    if (status == SS_ERR_NOT_APPLICABLE) return 2;
    return 1;
}

int run_verb(const char* verb, const std::string& config,
             const std::string& output, bool has_seed, uint64_t seed,
             bool quiet) {
    ss_status status = ss_run_command(
        verb, config.c_str(), output.empty() ? nullptr : output.c_str(),
        has_seed ? 1 : 0, seed, quiet ? 1 : 0);
    if (status != SS_OK)
        std::fprintf(stderr, "stochsync %s: %s\n", verb, ss_last_error());
    return exit_code_for(status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and analysis of diffusively coupled stochastic "
                 "networks"};
    app.set_version_flag("--version", std::string(ss_version()));
    app.require_subcommand(1);
    app.fallthrough();

    std::string config;
    std::string output;
    uint64_t seed = 0;
    bool quiet = false;
    app.add_option("--config", config, "Experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--output", output, "Output directory (overrides config)");
    CLI::Option* seed_opt =
        app.add_option("--seed", seed, "Override the simulation base seed");
    app.add_flag("--quiet", quiet, "Suppress stdout summaries");

    const char* verb = nullptr;
    app.add_subcommand("check",
                       "Evaluate the synchronization certificate")
        ->callback([&] { verb = "check"; });
    app.add_subcommand("simulate", "Integrate one trajectory and write CSVs")
        ->callback([&] { verb = "simulate"; });
    app.add_subcommand("sweep",
                       "Monte Carlo sweep over a model or coupling parameter")
        ->callback([&] { verb = "sweep"; });
    app.add_subcommand("noise-series",
                       "Write the state-dependent noise terms along a "
                       "trajectory")
        ->callback([&] { verb = "noise-series"; });
    app.add_subcommand("lambda2", "Print spectral info for the graph")
        ->callback([&] { verb = "lambda2"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1; // 0 covers --help / --version
    }

    return run_verb(verb, config, output, seed_opt->count() > 0, seed, quiet);
}
