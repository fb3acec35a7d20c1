#pragma once

// Dimensionless transform and DuFort–Frankel time marching for the slab:
//
//   C* ∂U/∂t* = Fo ∂/∂x* (k ∂U/∂x*)            0 < x* < 1
//   k ∂U/∂x* = h* Bi (U − U∞) − q*               x* = 0   (Robin)
//   U = U_g                                      x* = 1   (Dirichlet)

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "groundheat/domain.hpp"

namespace groundheat {

struct DimensionlessProblem {
    double conductivity_ratio;  ///< k = κ/κ_ref
    double capacity_ratio;      ///< C* = C/C_ref
    double fourier;             ///< Fo
    double biot;                ///< Bi^L
    double final_time;          ///< t_f / t_ref
    TimeSeries air;             ///< U∞(t*)
    TimeSeries deep;            ///< U_g(t*)
    TimeSeries flux;            ///< q*(t*)
    SurfaceCoefficient h;       ///< h*(t*)
    DepthProfile initial;       ///< U_in(x*)

    // Kept for redimensionalization.
    double depth;
    double time_scale;
    double temperature_scale;

    /// Effective diffusion number Fo·k/C*.
    double diffusivity() const noexcept { return fourier * conductivity_ratio / capacity_ratio; }
};

DimensionlessProblem nondimensionalize(const PhysicalProblem& problem, const ReferenceScales& refs,
                                       const SurfaceCoefficient& h);

/// How the second starting level of the three-level scheme is produced.
enum class Bootstrap {
    /// Forward Euler over the first Δt in equal sub-steps: `bootstrap_substeps` of them, or more
    /// when needed to keep r ≤ 1/2 per sub-step.
    SubsteppedEuler,
    /// One plain forward-Euler step.
    SingleEuler,
};

struct SolverSettings {
    std::size_t nodes = 101;  ///< J + 1
    double time_step = 0;     ///< Δt [s]
    Bootstrap bootstrap = Bootstrap::SubsteppedEuler;
    std::size_t bootstrap_substeps = 1;

    /// Number of time steps; throws DomainError unless Δt divides t_f to 1e-6 and J ≥ 3.
    std::size_t steps(double final_time) const;

    /// Largest Δt dividing t_f with κΔt/(CΔx²) ≤ 1/2.
    static SolverSettings stable_default(const PhysicalProblem& problem, std::size_t nodes = 101);

    /// Same settings with enough bootstrap sub-steps for diffusivities up to `headroom` times the
    /// problem's own. A fixed count keeps the solution smooth in κ and C.
    SolverSettings with_bootstrap_headroom(const PhysicalProblem& problem, double headroom = 4.0) const;
};

/// Nodal temperatures [K]; column n is time level n.
struct TemperatureField {
    std::vector<double> positions;  ///< x_j [m]
    std::vector<double> times;      ///< t_n [s]
    Eigen::MatrixXd values;         ///< (J+1) × (N+1)
};

/// Solve and redimensionalize. Throws NumericalFailure on a non-finite value.
TemperatureField solve_forward(const DimensionlessProblem& dimless, const SolverSettings& settings);

/// Bilinear interpolation of the field at the sensors; M × n_obs [K].
Eigen::MatrixXd predict_at_sensors(const TemperatureField& field, const MeasurementSet& sensors);

/// Same values as predict_at_sensors(solve_forward(...)) without storing the field.
Eigen::MatrixXd solve_at_sensors(const DimensionlessProblem& dimless, const SolverSettings& settings,
                                 const std::vector<double>& depths, const std::vector<double>& times);

/// Predicted sensor temperatures (M × n_obs) for the physical part of `values`.
Eigen::MatrixXd predict_temperatures(const PhysicalProblem& problem, const ReferenceScales& refs,
                                     const SolverSettings& settings,
                                     std::span<const double> values,
                                     const std::vector<double>& breakpoints, const MeasurementSet& sensors);

/// Uniform grid of n+1 points over [0, extent], exact at both ends.
std::vector<double> uniform_grid(double extent, std::size_t intervals);

}  // namespace groundheat
