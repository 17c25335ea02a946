#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace driftnoise::cli {

/// Known experiment names, hyphenated as on the command line.
extern const std::vector<std::string> kExperiments;

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 1;
    std::int64_t replicas = 10000;
    int depth = 12;
    int n_lo = 2;
    int n_hi = 5;
    std::vector<double> c_list{1.0};
    double lambda = 0.3;
    std::string output_dir = ".";
    int workers = 1;

    bool operator==(const ExperimentConfig&) const = default;
    void validate() const;  // throws ConfigError
};

/// Parses the key = value config format ('#' starts a comment).  Unknown keys
/// and type mismatches raise ConfigError with the offending line.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical key = value echo; parse_config_text(config_echo(c)) == c.
std::string config_echo(const ExperimentConfig& config);

struct RunReport {
    std::string experiment;
    std::string config_echo;
    double wall_seconds = 0.0;
    std::vector<std::string> rows;  // CSV lines as written (incl. schema comment and header)
    std::string csv_path;
    int exit_code = 0;          // 0 ok, 3 numerical failure
    std::string golden_status = "none";
    std::string error;
};

/// Runs the configured experiment and writes <output_dir>/<experiment>.csv.
/// Output bytes depend only on (config minus workers/output_dir).
RunReport run(const ExperimentConfig& config);

/// Field-exact CSV comparison (numeric fields compared within tol when
/// tol > 0).  Returns true when the files agree.
bool compare_csv_files(const std::string& produced, const std::string& golden, double tol = 0.0);

}  // namespace driftnoise::cli
