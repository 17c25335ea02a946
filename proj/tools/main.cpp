#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "driftnoise/errors.hpp"
#include "driftnoise/experiment.hpp"

namespace cli = driftnoise::cli;

int main(int argc, char** argv) {
    CLI::App app{"driftnoise: drift-sensitive binary extension experiments"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "run an experiment from a config file");
    std::string config_path;
    run_cmd->add_option("config", config_path, "key = value config file")->required();

    // flag overrides (applied after the file is parsed)
    std::string experiment, output_dir, golden_path;
    std::uint64_t seed = 0;
    std::int64_t replicas = 0;
    int depth = 0, workers = 0;
    double lambda = 0.0, golden_tol = 0.0;
    std::vector<double> c_values;
    std::vector<int> n_range;
    auto* opt_experiment = run_cmd->add_option("--experiment", experiment, "override experiment name");
    auto* opt_seed = run_cmd->add_option("--seed", seed, "override master seed");
    auto* opt_replicas = run_cmd->add_option("--replicas", replicas, "override replica count");
    auto* opt_depth = run_cmd->add_option("--depth", depth, "override grid depth");
    auto* opt_c = run_cmd->add_option("--c", c_values, "override shift constants");
    auto* opt_lambda = run_cmd->add_option("--lambda", lambda, "override drift parameter");
    auto* opt_out = run_cmd->add_option("--out", output_dir, "override output directory");
    auto* opt_workers = run_cmd->add_option("--workers", workers, "override worker count");
    auto* opt_n = run_cmd->add_option("--n-range", n_range, "override level range (two integers)")->expected(2);
    run_cmd->add_option("--golden", golden_path, "compare the produced CSV against this golden file");
    run_cmd->add_option("--golden-tol", golden_tol, "numeric tolerance for the golden comparison (0 = exact)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors share the config-error exit code
    }

    try {
        cli::ExperimentConfig config = cli::load_config(config_path);
        if (*opt_experiment) config.experiment = experiment;
        if (*opt_seed) config.seed = seed;
        if (*opt_replicas) config.replicas = replicas;
        if (*opt_depth) config.depth = depth;
        if (*opt_c) config.c_list = c_values;
        if (*opt_lambda) config.lambda = lambda;
        if (*opt_out) config.output_dir = output_dir;
        if (*opt_workers) config.workers = workers;
        if (*opt_n) {
            config.n_lo = n_range[0];
            config.n_hi = n_range[1];
        }
        config.validate();

        cli::RunReport report = cli::run(config);
        if (!golden_path.empty()) {
            bool ok = cli::compare_csv_files(report.csv_path, golden_path, golden_tol);
            report.golden_status = ok ? "match" : "mismatch";
        }
        std::cout << "# experiment: " << report.experiment << "\n";
        std::cout << "# wall_seconds: " << report.wall_seconds << "\n";
        std::cout << "# csv: " << report.csv_path << "\n";
        std::cout << "# golden: " << report.golden_status << "\n";
        std::cout << "# -- config echo --\n" << report.config_echo << "# -- rows --\n";
        for (const auto& row : report.rows) std::cout << row << "\n";

        if (report.golden_status == "mismatch") return 4;
        return report.exit_code;
    } catch (const driftnoise::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
