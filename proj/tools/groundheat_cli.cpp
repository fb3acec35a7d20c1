// groundheat: forward runs, sensitivities, twin data, MH estimation and chain diagnostics
// for the 1D ground-slab heat conduction model.

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "groundheat/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Ground-slab heat conduction: forward model and Bayesian parameter estimation"};
    app.require_subcommand(1, 1);

    groundheat::RunOptions opts;
    std::string mode;
    std::optional<std::string> chain_path;
    std::optional<std::string> data_dir;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config, "Run configuration (INI)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--seed", opts.seed, "Override [mcmc] seed");
        sub->add_option("--data", data_dir, "Directory with air_temperature.csv, net_radiation.csv, ...")
            ->check(CLI::ExistingDirectory);
        sub->add_flag("--hours", opts.units.hours, "Input time columns are in hours");
        sub->add_flag("--celsius", opts.units.celsius, "Input temperature columns are in degrees Celsius");
        sub->add_option("--filter-radiation", opts.filter_radiation,
                        "Centred moving-average window applied to net radiation [s]");
    };

    auto* forward = app.add_subcommand("forward", "Solve with the [material] and [surface_h] values");
    auto* sens = app.add_subcommand("sensitivity", "Central-difference sensitivities at the twin sensors");
    auto* synth = app.add_subcommand("synth", "Write twin measurements and boundary series");
    auto* estimate = app.add_subcommand("estimate", "Metropolis-Hastings estimation of kappa, C and h(t)");
    auto* diagnose = app.add_subcommand("diagnose", "Summary, Geweke, IACT, histograms for a chain");
    auto* residuals = app.add_subcommand("residuals", "Measured minus predicted temperatures");
    for (auto* sub : {forward, sens, synth, estimate, diagnose, residuals}) add_common(sub);

    estimate->add_option("--mode", mode, "Prior structure")
        ->check(CLI::IsMember({"caseAB", "caseC"}))
        ->default_val("caseAB");
    estimate->add_option("--chains", opts.chains, "Independent chains run concurrently")
        ->check(CLI::PositiveNumber)
        ->default_val(1);
    for (auto* sub : {diagnose, residuals})
        sub->add_option("--chain", chain_path, "Chain CSV (default: OUT/chain.csv)")->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    std::ostringstream cmd;
    for (int i = 0; i < argc; ++i) cmd << (i ? " " : "") << argv[i];
    opts.command = cmd.str();
    if (!mode.empty()) opts.mode = groundheat::parse_prior_mode(mode);
    if (chain_path) opts.chain = *chain_path;
    if (data_dir) opts.data_dir = *data_dir;

    return groundheat::run_stage(app.get_subcommands().front()->get_name(), opts);
}
