#pragma once

// Core data types for the ground-slab heat conduction problem. All quantities
// are SI (s, m, K, W, J); unit conversion happens only at the I/O boundary.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "groundheat/errors.hpp"

namespace groundheat {

/// Conductivity κ [W/(m·K)] and volumetric heat capacity C [J/(m³·K)].
class MaterialParams {
public:
    MaterialParams(double conductivity, double heat_capacity);

    double conductivity() const noexcept { return conductivity_; }
    double heat_capacity() const noexcept { return heat_capacity_; }

private:
    double conductivity_;
    double heat_capacity_;
};

/// Sampled series with strictly increasing times and finite values.
class TimeSeries {
public:
    TimeSeries(std::vector<double> times, std::vector<double> values);

    std::size_t size() const noexcept { return times_.size(); }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<double>& values() const noexcept { return values_; }
    double start() const noexcept { return times_.front(); }
    double end() const noexcept { return times_.back(); }

    bool covers(double t0, double t1) const noexcept;

    /// Piecewise-linear value at t; throws DomainError outside [start, end].
    double at(double t) const;

    /// Same series with times and values multiplied by the given factors.
    TimeSeries scaled(double time_factor, double value_factor) const;

private:
    std::vector<double> times_;
    std::vector<double> values_;
};

/// Piecewise-linear function of depth, held constant beyond its outermost nodes.
class DepthProfile {
public:
    DepthProfile(std::vector<double> depths, std::vector<double> values);

    static DepthProfile uniform(double value);

    double at(double x) const noexcept;
    const std::vector<double>& depths() const noexcept { return depths_; }
    const std::vector<double>& values() const noexcept { return values_; }

    DepthProfile scaled(double depth_factor, double value_factor) const;

private:
    std::vector<double> depths_;
    std::vector<double> values_;
};

struct PhysicalProblemData {
    double depth;
    double final_time;
    MaterialParams material;
    TimeSeries air_temperature;
    TimeSeries net_radiation;
    TimeSeries deep_temperature;
    DepthProfile initial_profile;
};

/// Slab of depth L over [0, t_f] with surface exchange and a pinned deep temperature.
class PhysicalProblem {
public:
    explicit PhysicalProblem(PhysicalProblemData data);

    double depth() const noexcept { return d_.depth; }
    double final_time() const noexcept { return d_.final_time; }
    const MaterialParams& material() const noexcept { return d_.material; }
    const TimeSeries& air_temperature() const noexcept { return d_.air_temperature; }
    const TimeSeries& net_radiation() const noexcept { return d_.net_radiation; }
    const TimeSeries& deep_temperature() const noexcept { return d_.deep_temperature; }
    const DepthProfile& initial_profile() const noexcept { return d_.initial_profile; }

    PhysicalProblem with_material(const MaterialParams& material) const;
    PhysicalProblem with_net_radiation(TimeSeries net_radiation) const;

private:
    PhysicalProblemData d_;
};

/// Scales used to build the dimensionless problem.
class ReferenceScales {
public:
    ReferenceScales(double time, double temperature, double conductivity, double heat_capacity,
                    double heat_transfer);

    double time() const noexcept { return time_; }
    double temperature() const noexcept { return temperature_; }
    double conductivity() const noexcept { return conductivity_; }
    double heat_capacity() const noexcept { return heat_capacity_; }
    double heat_transfer() const noexcept { return heat_transfer_; }

    /// Fo = κ_ref·t_ref / (C_ref·L²)
    double fourier(double depth) const noexcept;
    /// Bi = h_ref·L / κ_ref
    double biot(double depth) const noexcept;

private:
    double time_;
    double temperature_;
    double conductivity_;
    double heat_capacity_;
    double heat_transfer_;
};

/// N_t+1 equally spaced breakpoints over [0, t_f].
std::vector<double> build_uniform_partition(double final_time, std::size_t intervals);

/// Piecewise-constant h(t). Interval i is [t_i, t_{i+1}); the last one is closed at t_f.
class SurfaceCoefficient {
public:
    SurfaceCoefficient(std::vector<double> breakpoints, std::vector<double> values);

    std::size_t intervals() const noexcept { return values_.size(); }
    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    const std::vector<double>& values() const noexcept { return values_; }
    double final_time() const noexcept { return breakpoints_.back(); }

    /// Index of the interval containing t; throws DomainError outside [0, t_f].
    std::size_t interval_index(double t) const;

    SurfaceCoefficient scaled(double time_factor, double value_factor) const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

double evaluate_surface_coefficient(const SurfaceCoefficient& coeff, double t);

/// Temperatures at M sensor depths and n_obs times, with i.i.d. noise of std σ.
class MeasurementSet {
public:
    MeasurementSet(std::vector<double> depths, std::vector<double> times,
                   Eigen::MatrixXd temperatures, double noise_std);

    std::size_t sensors() const noexcept { return depths_.size(); }
    std::size_t observations() const noexcept { return times_.size(); }
    /// D = M·n_obs
    std::size_t size() const noexcept { return sensors() * observations(); }

    const std::vector<double>& depths() const noexcept { return depths_; }
    const std::vector<double>& times() const noexcept { return times_; }
    /// M × n_obs
    const Eigen::MatrixXd& temperatures() const noexcept { return temperatures_; }
    double noise_std() const noexcept { return noise_std_; }

    MeasurementSet with_temperatures(Eigen::MatrixXd temperatures) const;

    /// Throws DomainError unless depths lie in [0, L] and times in [0, t_f].
    void check_within(double depth, double final_time) const;

private:
    std::vector<double> depths_;
    std::vector<double> times_;
    Eigen::MatrixXd temperatures_;
    double noise_std_;
};

/// Index map of the unknowns (κ, C, h_1..h_Nt[, γ]).
class ParameterLayout {
public:
    ParameterLayout(std::size_t intervals, bool has_gamma);

    std::size_t intervals() const noexcept { return intervals_; }
    bool has_gamma() const noexcept { return has_gamma_; }
    std::size_t size() const noexcept { return 2 + intervals_ + (has_gamma_ ? 1 : 0); }
    /// κ, C and the h values; excludes γ.
    std::size_t physical_size() const noexcept { return 2 + intervals_; }

    static constexpr std::size_t conductivity_index = 0;
    static constexpr std::size_t heat_capacity_index = 1;
    std::size_t h_index(std::size_t i) const noexcept { return 2 + i; }
    std::size_t gamma_index() const;

    /// Column names: kappa, C, h1..hN, gamma.
    std::vector<std::string> names() const;

    bool operator==(const ParameterLayout&) const = default;

private:
    std::size_t intervals_;
    bool has_gamma_;
};

struct UnpackedParameters {
    double conductivity;
    double heat_capacity;
    std::vector<double> h;
    std::optional<double> gamma;
};

/// Strictly positive parameter vector with its layout.
class ParameterVector {
public:
    ParameterVector(ParameterLayout layout, std::vector<double> values);

    static ParameterVector pack(double conductivity, double heat_capacity, std::span<const double> h,
                                std::optional<double> gamma = std::nullopt);
    UnpackedParameters unpack() const;

    const ParameterLayout& layout() const noexcept { return layout_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_.at(i); }

private:
    ParameterLayout layout_;
    std::vector<double> values_;
};

}  // namespace groundheat
