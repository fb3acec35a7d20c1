#pragma once

// INI-style run configuration. Sections and keys:
//
//   [geometry]    L_m, t_f_s
//   [material]    kappa, C                         (true / nominal values)
//   [surface_h]   breakpoints_s | n_intervals, values (list, or one value for all)
//   [priors]      kappa_mean, kappa_std, C_mean, C_std, h_mean, h_std
//   [mcmc]        n_states, omega (scalar or per-parameter list), seed, burn_in,
//                 optional omega_kappa, omega_C, omega_h, omega_gamma overrides
//   [smoothness]  gamma0
//   [solver]      nodes, dt_s, bootstrap (substepped | single)
//   [references]  t_ref_s, T_ref_K, kappa_ref, C_ref, h_ref         (all optional)
//   [data]        air_temperature, net_radiation, deep_temperature, measurements,
//                 initial_profile, wind, noise_std_K                 (all optional)
//   [twin]        sensor_depths_m, cadence_s, noise_std_K, seed, h_breakpoints_s, h_values
//
// Lists are comma separated. Relative data paths resolve against the config file.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "groundheat/domain.hpp"
#include "groundheat/forward.hpp"

namespace groundheat {

struct PriorConfig {
    double kappa_mean = 2.27;
    double kappa_std = 0.1135;
    double C_mean = 2.10e6;
    double C_std = 0.021e6;
    double h_mean = 10.0;
    double h_std = 5.0;
};

struct McmcConfig {
    std::size_t n_states = 200000;
    std::vector<double> omega{0.02};
    std::optional<double> omega_kappa;
    std::optional<double> omega_C;
    std::optional<double> omega_h;
    std::optional<double> omega_gamma;
    std::uint64_t seed = 1;
    std::size_t burn_in = 90000;
};

struct DataPaths {
    std::optional<std::filesystem::path> air_temperature;
    std::optional<std::filesystem::path> net_radiation;
    std::optional<std::filesystem::path> deep_temperature;
    std::optional<std::filesystem::path> measurements;
    std::optional<std::filesystem::path> initial_profile;
    std::optional<std::filesystem::path> wind;
    std::optional<double> noise_std;
};

struct TwinConfig {
    std::vector<double> sensor_depths{0.0, 0.01, 0.02, 0.03, 0.04};
    double cadence = 900.0;
    double noise_std = 0.25;
    std::uint64_t seed = 7;
    std::optional<std::vector<double>> h_breakpoints;
    std::optional<std::vector<double>> h_values;
};

struct ReferenceConfig {
    std::optional<double> time;
    std::optional<double> temperature;
    std::optional<double> conductivity;
    std::optional<double> heat_capacity;
    std::optional<double> heat_transfer;
};

struct RunConfig {
    double depth = 0.05;
    double final_time = 28 * 3600.0;
    double kappa = 2.27;
    double heat_capacity = 2.10e6;
    std::vector<double> h_breakpoints;
    std::vector<double> h_values;
    PriorConfig priors;
    McmcConfig mcmc;
    std::optional<double> gamma0;
    std::size_t nodes = 101;
    std::optional<double> dt;
    Bootstrap bootstrap = Bootstrap::SubsteppedEuler;
    ReferenceConfig references;
    DataPaths data;
    TwinConfig twin;

    MaterialParams material() const { return MaterialParams(kappa, heat_capacity); }
    SurfaceCoefficient surface_coefficient() const;
    SurfaceCoefficient twin_surface_coefficient() const;
    ReferenceScales reference_scales() const;
    SolverSettings solver_settings(const PhysicalProblem& problem) const;
};

/// Throws ConfigError naming "section.key" for invalid or inconsistent entries.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

}  // namespace groundheat
