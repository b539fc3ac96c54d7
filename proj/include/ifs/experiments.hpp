#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ifs {

struct ExperimentOptions {
    std::uint64_t seed = 0;
    std::filesystem::path output_root = "results";
    /// Parameter overrides; keys must exist in the experiment's defaults.
    nlohmann::json overrides = nlohmann::json::object();
    int threads = 0;
    /// Run directory name; empty means a UTC timestamp.
    std::string run_label;
};

struct ExperimentResult {
    std::string name;
    nlohmann::json parameters;
    bool verdict = false;
    std::map<std::string, double> metrics;
    std::vector<std::string> artifacts;
    double wall_time = 0.0;
    std::filesystem::path directory;
};

/// Names of the catalog, in a fixed order.
const std::vector<std::string>& experiment_names();

/// Default parameters (thresholds included) for one experiment.
nlohmann::json experiment_defaults(const std::string& name);

/// Runs one experiment and writes results/<name>/<run>/{result.json, *.csv}.
/// Throws DomainError for unknown names or override keys.
ExperimentResult run_experiment(const std::string& name, const ExperimentOptions& options = {});

nlohmann::json to_json(const ExperimentResult& r);

}  // namespace ifs
