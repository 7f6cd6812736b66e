// Command-line runner for the convolution, inequality and solver experiments.
#include "sconv/commands.hpp"
#include "sconv/config.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

struct RunOptions {
    std::string config_path;
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::size_t> paths;
    std::optional<std::size_t> grid_levels;
    std::string out_dir;
};

sconv::ExperimentConfig resolve(const RunOptions& opts)
{
    sconv::ConfigOverrides overrides{opts.seed, opts.workers, opts.paths, opts.grid_levels, std::nullopt};
    if (!opts.out_dir.empty())
        overrides.out_dir = opts.out_dir;
    else if (const char* env = std::getenv("SCONV_OUT_DIR"); env && *env)
        overrides.out_dir = env;

    if (opts.config_path.empty() == opts.scenario.empty())
        throw sconv::ConfigError("give exactly one of --config or --scenario");
    sconv::ExperimentConfig cfg = opts.config_path.empty() ? sconv::bundled_config(opts.scenario, overrides)
                                                            : sconv::load_config(opts.config_path, overrides);
    if (cfg.out_dir.empty())
        cfg.out_dir = std::filesystem::path("sconv-out") / cfg.scenario;
    return cfg;
}

void add_run_options(CLI::App& sub, RunOptions& opts)
{
    sub.add_option("--config", opts.config_path, "JSON experiment file");
    sub.add_option("--scenario", opts.scenario, "bundled scenario name (see list-scenarios)");
    sub.add_option("--seed", opts.seed, "master seed");
    sub.add_option("--workers", opts.workers, "worker threads; results do not depend on it")
        ->check(CLI::PositiveNumber);
    sub.add_option("--paths", opts.paths, "Monte-Carlo paths or battery size")->check(CLI::PositiveNumber);
    sub.add_option("--grid-levels", opts.grid_levels, "number of grid refinement levels")
        ->check(CLI::PositiveNumber);
    sub.add_option("--out", opts.out_dir, "output directory (else $SCONV_OUT_DIR, config \"out\", ./sconv-out/<scenario>)");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stochastic convolutions with Poisson jumps: checks, solvers and estimators"};
    app.require_subcommand(1);

    RunOptions opts;
    std::vector<std::pair<CLI::App*, sconv::Command>> runners;
    for (const auto* name : {"verify-pathwise", "verify-moments", "solve", "picard", "stability"}) {
        CLI::App* sub = app.add_subcommand(name);
        add_run_options(*sub, opts);
        runners.emplace_back(sub, *sconv::parse_command(name));
    }
    runners[0].first->description("p-th power inequality on jump paths under grid refinement");
    runners[1].first->description("Monte-Carlo moment ratios with intensity and scaling sweeps");
    runners[2].first->description("direct time stepping of the nonlinear equation");
    runners[3].first->description("Picard iteration with contraction diagnostics");
    runners[4].first->description("exponential stability of the p-th moment difference");

    CLI::App* list = app.add_subcommand("list-scenarios", "print the bundled scenarios");
    std::string show_name;
    CLI::App* show = app.add_subcommand("show-scenario", "print a bundled scenario's JSON");
    show->add_option("name", show_name)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : sconv::exit_code::usage;
    }

    try {
        if (list->parsed()) {
            for (const auto& s : sconv::bundled_scenarios())
                std::cout << s.name << "  " << s.summary << '\n';
            return sconv::exit_code::pass;
        }
        if (show->parsed()) {
            for (const auto& s : sconv::bundled_scenarios()) {
                if (s.name == show_name) {
                    std::cout << s.json;
                    return sconv::exit_code::pass;
                }
            }
            throw sconv::ConfigError("unknown scenario '" + show_name + "'");
        }
        for (const auto& [sub, command] : runners) {
            if (!sub->parsed())
                continue;
            const sconv::ExperimentConfig cfg = resolve(opts);
            return sconv::run_command(command, cfg, std::cout).exit_code;
        }
    } catch (const sconv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return sconv::exit_code::usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return sconv::exit_code::fail;
    }
    return sconv::exit_code::usage;
}
