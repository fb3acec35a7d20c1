#include "groundheat/sensitivity.hpp"

#include "groundheat/parallel.hpp"

namespace groundheat {

SensitivityMatrix::SensitivityMatrix(std::size_t sensors, std::size_t parameters, std::size_t times)
    : sensors_(sensors), parameters_(parameters), times_(times), data_(sensors * parameters * times, 0.0) {}

SensitivityMatrix central_differences(const SensorModel& model, std::span<const double> p, std::size_t sensors,
                                      std::size_t times, bool reduced, double relative_step, std::size_t workers) {
    if (!(relative_step > 0)) throw DomainError("sensitivity step must be positive");
    const std::size_t np = p.size();
    SensitivityMatrix X(sensors, np, times);
    X.reduced = reduced;
    X.steps.resize(np);
    for (std::size_t j = 0; j < np; ++j) X.steps[j] = relative_step * p[j];

    // Task 2j is the +Δ solve for parameter j, task 2j+1 the −Δ solve.
    std::vector<Eigen::MatrixXd> solves(2 * np);
    parallel_for(
        2 * np,
        [&](std::size_t task) {
            const std::size_t j = task / 2;
            std::vector<double> q(p.begin(), p.end());
            q[j] += (task % 2 == 0) ? X.steps[j] : -X.steps[j];
            try {
                solves[task] = model(q);
            } catch (const std::exception& e) {
                throw SensitivityFailure(j, e.what());
            }
            if (static_cast<std::size_t>(solves[task].rows()) != sensors ||
                static_cast<std::size_t>(solves[task].cols()) != times)
                throw SensitivityFailure(j, "model output has the wrong shape");
        },
        workers);

    for (std::size_t j = 0; j < np; ++j) {
        const double scale = reduced ? p[j] : 1.0;
        const Eigen::MatrixXd& plus = solves[2 * j];
        const Eigen::MatrixXd& minus = solves[2 * j + 1];
        for (std::size_t i = 0; i < sensors; ++i)
            for (std::size_t n = 0; n < times; ++n) {
                const auto r = static_cast<long>(i);
                const auto c = static_cast<long>(n);
                X(i, j, n) = scale * (plus(r, c) - minus(r, c)) / (2.0 * X.steps[j]);
            }
    }
    return X;
}

SensitivityMatrix sensitivities(const PhysicalProblem& problem, const ReferenceScales& refs,
                                const SolverSettings& settings, const ParameterVector& parameters,
                                const std::vector<double>& breakpoints, const MeasurementSet& sensors,
                                bool reduced, double relative_step, std::size_t workers) {
    const ParameterLayout& layout = parameters.layout();
    if (breakpoints.size() != layout.intervals() + 1)
        throw DomainError("breakpoints do not match the parameter layout");
    const std::size_t np = layout.physical_size();
    const std::span<const double> p(parameters.values().data(), np);
    const SensorModel model = [&](std::span<const double> q) {
        return predict_temperatures(problem, refs, settings, q, breakpoints, sensors);
    };
    SensitivityMatrix X = central_differences(model, p, sensors.sensors(), sensors.observations(), reduced,
                                              relative_step, workers);
    X.depths = sensors.depths();
    X.observation_times = sensors.times();
    auto names = layout.names();
    X.names.assign(names.begin(), names.begin() + static_cast<long>(np));
    return X;
}

}  // namespace groundheat
