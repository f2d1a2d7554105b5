#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sslr/config.hpp"
#include "sslr/experiments.hpp"
#include "sslr/svg_plot.hpp"
#include "sslr/version.hpp"

namespace {

enum ExitCode : int {
    exit_ok = 0,
    exit_config_error = 1,
    exit_model_error = 2,
    exit_check_failure = 3,
};

std::string resolve_out_dir(const std::string& cli_out, const std::string& cfg_out) {
    if (!cli_out.empty())
        return cli_out;
    if (!cfg_out.empty())
        return cfg_out;
    if (const char* env = std::getenv("SSLR_LAB_OUT"); env && *env)
        return env;
    return "./out";
}

void write_outputs(const std::vector<sslr::ExperimentOutput>& outputs,
                   const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    for (const sslr::ExperimentOutput& o : outputs) {
        const std::string base = out_dir + "/" + o.table.name;
        sslr::write_csv(o.table, base + ".csv");
        std::printf("wrote %s.csv (%zu rows)\n", base.c_str(), o.table.rows.size());
        if (o.plot && !o.table.rows.empty()) {
            sslr::emit_plot(o.table, o.kind, base + ".svg");
            std::printf("wrote %s.svg\n", base.c_str());
        }
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(sslr::tool_name) +
                 ": asymmetric-SSLR power and rate experiments"};
    app.set_version_flag("--version", std::string(sslr::tool_version));

    std::string experiment;
    app.add_option("experiment", experiment,
                   "one of: optimize-cavity, optimize-placement, optimize-functional, "
                   "tradeoff, sweep-distance")
        ->required();

    std::string config_path;
    app.add_option("--config", config_path, "scenario file (JSON)")->required();

    std::uint64_t seed = 0;
    const auto* seed_opt = app.add_option("--seed", seed, "override the scenario seed");

    std::string out_dir;
    app.add_option("--out", out_dir,
                   "output directory (default: config out_dir, then $SSLR_LAB_OUT, "
                   "then ./out)");

    bool full_budget = false;
    app.add_flag("--full-budget", full_budget,
                 "run the Monte Carlo stages at the full 1e6-samples-per-iteration "
                 "budget instead of the scenario's");

    bool check = false;
    app.add_flag("--check", check, "verify golden values and fail if any miss");

    CLI11_PARSE(app, argc, argv);

    sslr::ScenarioConfig sc;
    try {
        sc = sslr::load_scenario(config_path);
        if (seed_opt->count() > 0)
            sc.optimizer.seed = seed;
        if (full_budget) {
            sc.optimizer.n_smax = 1000000;
            sc.placement.n_smax = 1000000;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config_error;
    }

    const std::string dir = resolve_out_dir(out_dir, sc.out_dir);

    sslr::ExperimentRun run;
    try {
        run = sslr::run_experiment(experiment, sc, check);
    } catch (const sslr::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config_error;
    } catch (const sslr::ExperimentError& e) {
        std::fprintf(stderr, "model error: %s\n", e.what());
        if (!e.partial.empty()) {
            std::fprintf(stderr, "writing partial results for diagnosis\n");
            try {
                write_outputs(e.partial, dir);
            } catch (const std::exception& io) {
                std::fprintf(stderr, "could not write partial results: %s\n", io.what());
            }
        }
        return exit_model_error;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "model error: %s\n", e.what());
        return exit_model_error;
    }

    try {
        write_outputs(run.outputs, dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "output error: %s\n", e.what());
        return exit_model_error;
    }

    if (check) {
        bool all_pass = true;
        for (const sslr::CheckResult& c : run.checks) {
            std::printf("check %-48s %s  (%s)\n", c.name.c_str(),
                        c.pass ? "PASS" : "FAIL", c.detail.c_str());
            all_pass = all_pass && c.pass;
        }
        if (run.checks.empty())
            std::printf("check: nothing to verify for this experiment\n");
        if (!all_pass)
            return exit_check_failure;
    }
    return exit_ok;
}
