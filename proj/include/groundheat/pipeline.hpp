#pragma once

// Stages behind the command-line front end. Each stage reads the shared config,
// writes its artifacts under `out_dir` plus a manifest.json, and returns the
// list of files it wrote.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "groundheat/config.hpp"
#include "groundheat/inference.hpp"
#include "groundheat/io.hpp"

namespace groundheat {

struct RunOptions {
    std::filesystem::path config;
    std::filesystem::path out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::size_t chains = 1;
    std::optional<PriorMode> mode;
    io::IngestUnits units;
    std::optional<double> filter_radiation;  ///< moving-average window for q∞ [s]
    std::optional<std::filesystem::path> data_dir;
    std::optional<std::filesystem::path> chain;  ///< diagnose/residuals input; defaults to out_dir/chain.csv
    std::string command;                         ///< echoed into the manifest
};

/// Config plus everything loaded or synthesized from it.
struct Inputs {
    RunConfig config;
    PhysicalProblem problem;  ///< carries the nominal material from [material]
    ReferenceScales refs;
    SolverSettings settings;
    std::optional<MeasurementSet> measurements;
    std::optional<TimeSeries> wind;
};

Inputs load_inputs(const RunOptions& options);

/// Twin measurements from [twin] with the nominal material.
MeasurementSet twin_measurements(const Inputs& inputs);

/// Posterior model and MH settings for an estimation run.
struct EstimationSetup {
    PosteriorModel model;
    MHConfig mh;
    std::vector<double> initial;
};
EstimationSetup make_estimation(const Inputs& inputs, PriorMode mode, const MeasurementSet& data);

std::vector<std::filesystem::path> run_forward(const RunOptions& options);
std::vector<std::filesystem::path> run_sensitivity(const RunOptions& options);
std::vector<std::filesystem::path> run_synth(const RunOptions& options);
std::vector<std::filesystem::path> run_estimation(const RunOptions& options);
std::vector<std::filesystem::path> run_diagnose(const RunOptions& options);
std::vector<std::filesystem::path> run_residuals(const RunOptions& options);

/// Runs a stage by name and maps failures to exit codes: 0 ok, 2 bad config or input,
/// 3 solver or sampler failure. Errors are reported on stderr.
int run_stage(const std::string& stage, const RunOptions& options);

}  // namespace groundheat
