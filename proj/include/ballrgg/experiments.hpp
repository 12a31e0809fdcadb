#pragma once

// Replicated simulation sweeps written as plot-ready CSV files.
//
// Every experiment writes <name>_raw.csv (one row per replication, columns
// n, rep, value, status, ...), <name>_aggregated.csv (median and type-7
// quartiles of the successful values per group) and manifest.json. Raw and
// aggregated files depend only on the config, never on the thread count;
// the manifest timestamp is the only run-dependent field.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ballrgg/model.hpp"

namespace ballrgg::experiments {

inline constexpr std::string_view kVersion = "0.1.0";

inline constexpr std::string_view kExperimentNames[] = {
    "norm-recovery", "gram-recovery", "gap-sweep", "degree-histogram", "spectrum-dump", "consistency-suite",
};

struct ExperimentConfig {
    std::string experiment;
    ModelConfig model;
    std::vector<int> n_values;
    int replications = 1;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = ".";
    /// Experiment-specific keys: tau, r_values, alpha, N_max, m_quad,
    /// hist_min_degree, renormalize_rows, cluster_mode.
    nlohmann::json extra = nlohmann::json::object();
};

/// Throws ConfigError with a message naming the offending key.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

struct RunResult {
    std::vector<std::string> files;  ///< names relative to output_dir
    int estimation_errors = 0;       ///< replications whose status is not "ok"
    int failed_checks = 0;           ///< consistency-suite only
    nlohmann::json manifest;
};

/// Runs the configured experiment; creates output_dir if needed.
RunResult run(const ExperimentConfig& cfg);

/// Stream key of replication r at size n: (seed, fnv1a(experiment), n, r).
std::uint64_t replication_seed(std::uint64_t seed, std::string_view experiment, int n, int r);

/// Type-7 (linear interpolation) sample quantile; throws on empty input.
double quantile(std::vector<double> values, double p);

struct Summary {
    std::size_t count = 0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};
Summary summarize(std::span<const double> values);

}  // namespace ballrgg::experiments
