#pragma once
// Experiment configs, runners producing JSON result envelopes, and report rendering.

#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace ldg {

// Invalid config or command line; maps to the usage exit status.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string kind;
    std::map<std::string, std::string> params;  // values are numbers or comma-separated number lists
    std::string output_dir;

    double real(const std::string& key) const;
    int integer(const std::string& key) const;
    std::vector<double> list(const std::string& key) const;  // empty for an empty value
};

const std::vector<std::string>& experiment_kinds();

// Flat `key = value` lines; `#` starts a comment. `kind` is required, `output_dir` optional.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

// Fill defaults for the kind, reject unknown keys and non-positive tolerances.
ExperimentConfig complete_config(ExperimentConfig cfg);

struct RunOptions {
    int workers = 1;
    std::string version = "unknown";
};

// Executes the experiment, writes `<output_dir>/<kind>.json` plus CSV and field files,
// and returns the envelope. Everything except the "timing" member is deterministic.
nlohmann::json run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

// True when every summary entry carrying a verdict passed.
bool envelope_passed(const nlohmann::json& envelope);

// Markdown tables of landmark, reference, computed value, tolerance and verdict per envelope.
// Envelopes of one kind at two grids add a Richardson column. Throws ConfigError on an empty list.
std::string render_report(const std::vector<std::string>& envelope_paths);

// CSV text of a stored field file (disc profile or meridian field).
std::string field_csv(const std::string& field_path);

}  // namespace ldg
