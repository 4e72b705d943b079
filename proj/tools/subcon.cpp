// Command-line front end: run, check and sweep a scenario file.
#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "subcon/scenario.hpp"

namespace {

struct Options {
    std::string config;
    std::string out;
    int seeds = 10;
    std::optional<double> tol;
};

std::filesystem::path out_dir(const Options& opts, const subcon::ScenarioConfig& config) {
    if (!opts.out.empty()) return opts.out;
    const std::filesystem::path configured = config.output;
    return configured.is_absolute() ? configured : config.base_dir / configured;
}

int do_run(const Options& opts) {
    const auto config = subcon::load_config(opts.config);
    const auto dir = out_dir(opts, config);
    const auto result = subcon::cmd_run(config, dir);
    std::cout << "rounds " << result.trace.length() << ", relay " << result.trace.relay_rounds << ", vol(P(0)) "
              << result.trace.initial_volume << '\n'
              << "wrote " << dir.string() << '\n';
    return 0;
}

int do_check(const Options& opts) {
    const auto config = subcon::load_config(opts.config);
    const auto dir = out_dir(opts, config);
    const auto result = subcon::cmd_check(config, dir, opts.tol);
    std::cout << subcon::summary_text(result) << "wrote " << dir.string() << '\n';
    return result.violations() == 0 ? 0 : 1;
}

int do_sweep(const Options& opts) {
    const auto config = subcon::load_config(opts.config);
    const auto dir = out_dir(opts, config);
    const auto sweep = subcon::cmd_sweep(config, opts.seeds, dir, opts.tol);
    std::size_t failed = 0;
    for (const auto& r : sweep.per_seed) failed += r.violations() > 0;
    std::printf("seeds %d, failing seeds %zu, violations %zu\n", opts.seeds, failed, sweep.violations());
    if (sweep.ratios.count > 0) {
        std::printf("volume ratio over %zu rounds: min %.6g  median %.6g  max %.6g\n", sweep.ratios.count,
                    sweep.ratios.min, sweep.ratios.median, sweep.ratios.max);
    }
    std::cout << "wrote " << dir.string() << '\n';
    return sweep.violations() == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Averaging under oblivious message adversaries: simulate and verify"};
    app.require_subcommand(1);
    Options opts;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config, "Scenario JSON file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", opts.out, "Output directory (default: the config's \"output\")");
    };
    auto add_tol = [&](CLI::App* cmd) {
        cmd->add_option("--tol", opts.tol, "Override every verifier tolerance")->check(CLI::PositiveNumber);
    };

    auto* run = app.add_subcommand("run", "Simulate and write trace, metrics and manifest");
    add_common(run);
    auto* check = app.add_subcommand("check", "Simulate and evaluate the configured verifiers");
    add_common(check);
    add_tol(check);
    auto* sweep = app.add_subcommand("sweep", "check over a range of seed offsets");
    add_common(sweep);
    add_tol(sweep);
    sweep->add_option("--seeds", opts.seeds, "Number of seeds")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return do_run(opts);
        if (*check) return do_check(opts);
        return do_sweep(opts);
    } catch (const subcon::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
