#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "groundheat/domain.hpp"
#include "groundheat/forward.hpp"

namespace groundheat {

/// X[i, j, n] = ∂T(x_i, t_n)/∂p_j by central differences, for the physical
/// parameters (κ, C, h_1..h_Nt). A trailing γ in the input vector is ignored.
class SensitivityMatrix {
public:
    SensitivityMatrix(std::size_t sensors, std::size_t parameters, std::size_t times);

    double operator()(std::size_t sensor, std::size_t parameter, std::size_t time) const {
        return data_[index(sensor, parameter, time)];
    }
    double& operator()(std::size_t sensor, std::size_t parameter, std::size_t time) {
        return data_[index(sensor, parameter, time)];
    }

    std::size_t sensors() const noexcept { return sensors_; }
    std::size_t parameters() const noexcept { return parameters_; }
    std::size_t times() const noexcept { return times_; }

    std::vector<double> steps;             ///< Δp_j
    std::vector<std::string> names;        ///< parameter names
    std::vector<double> depths;            ///< sensor depths [m]
    std::vector<double> observation_times; ///< [s]
    bool reduced = false;                  ///< entries multiplied by p_j

private:
    std::size_t index(std::size_t i, std::size_t j, std::size_t n) const noexcept {
        return (j * sensors_ + i) * times_ + n;
    }
    std::size_t sensors_;
    std::size_t parameters_;
    std::size_t times_;
    std::vector<double> data_;
};

/// Relative parameter mesh Δp_j = step·p_j.
inline constexpr double kSensitivityRelativeStep = 1e-2;

/// Forward-solver failure at a perturbed parameter.
class SensitivityFailure : public std::runtime_error {
public:
    SensitivityFailure(std::size_t parameter, const std::string& what)
        : std::runtime_error("forward solve failed perturbing parameter " + std::to_string(parameter) +
                             ": " + what),
          parameter_(parameter) {}
    std::size_t parameter() const noexcept { return parameter_; }

private:
    std::size_t parameter_;
};

/// Sensor-shaped model output (M × n_obs) as a function of the parameters.
using SensorModel = std::function<Eigen::MatrixXd(std::span<const double>)>;

/// Central differences of `model` around p with Δp_j = step·p_j; 2N model calls on up to
/// `workers` threads. Failures are rethrown as SensitivityFailure naming the parameter.
SensitivityMatrix central_differences(const SensorModel& model, std::span<const double> p, std::size_t sensors,
                                      std::size_t times, bool reduced,
                                      double relative_step = kSensitivityRelativeStep, std::size_t workers = 0);

/// 2N forward solves, run concurrently on up to `workers` threads (0 = all cores).
SensitivityMatrix sensitivities(const PhysicalProblem& problem, const ReferenceScales& refs,
                                const SolverSettings& settings, const ParameterVector& parameters,
                                const std::vector<double>& breakpoints, const MeasurementSet& sensors,
                                bool reduced, double relative_step = kSensitivityRelativeStep,
                                std::size_t workers = 0);

}  // namespace groundheat
