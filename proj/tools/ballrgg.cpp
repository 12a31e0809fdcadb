// ballrgg <experiment> --config <file> [--seed N] [--output-dir D] [--threads K]
//
// Exit codes: 0 success, 1 failed consistency checks, 2 configuration error,
// 3 at least one replication recorded an estimation error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "ballrgg/errors.hpp"
#include "ballrgg/experiments.hpp"

namespace ex = ballrgg::experiments;

int main(int argc, char** argv) {
    CLI::App app{"Random geometric graphs on the unit ball: simulation sweeps"};
    std::string experiment;
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    int threads = 0;

    std::vector<std::string> names(std::begin(ex::kExperimentNames), std::end(ex::kExperimentNames));
    app.add_option("experiment", experiment, "Experiment to run")->required()->check(CLI::IsMember(names));
    app.add_option("--config", config_path, "JSON experiment config");
    app.add_option("--seed", seed, "Override the config seed");
    app.add_option("--output-dir", output_dir, "Override the config output directory");
    app.add_option("--threads", threads, "OpenMP threads (default: runtime default)")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ex::ExperimentConfig cfg;
        if (config_path.empty()) {
            if (experiment != "consistency-suite") throw ballrgg::ConfigError("--config is required for " + experiment);
            cfg.experiment = experiment;
        } else {
            cfg = ex::load_config(config_path);
            if (cfg.experiment != experiment) {
                throw ballrgg::ConfigError("config describes '" + cfg.experiment + "' but '" + experiment +
                                           "' was requested");
            }
        }
        if (seed) cfg.seed = *seed;
        if (output_dir) cfg.output_dir = *output_dir;
        if (threads > 0) omp_set_num_threads(threads);

        const ex::RunResult result = ex::run(cfg);
        for (const auto& f : result.files) std::cout << (cfg.output_dir / f).string() << '\n';
        if (result.failed_checks > 0) {
            std::cerr << result.failed_checks << " consistency check(s) failed\n";
            return 1;
        }
        if (result.estimation_errors > 0) {
            std::cerr << result.estimation_errors << " replication(s) recorded an estimation error\n";
            return 3;
        }
        return 0;
    } catch (const ballrgg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
