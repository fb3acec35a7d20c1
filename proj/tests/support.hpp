#pragma once

#include <cmath>
#include <vector>

#include "groundheat/domain.hpp"
#include "groundheat/forward.hpp"

namespace testing {

inline groundheat::TimeSeries constant_series(double final_time, double value) {
    return groundheat::TimeSeries({0.0, final_time}, {value, value});
}

// Slab with constant boundary data.
inline groundheat::PhysicalProblem constant_problem(double depth, double final_time, double kappa, double c,
                                                    double air, double flux, double deep,
                                                    groundheat::DepthProfile initial) {
    return groundheat::PhysicalProblem(groundheat::PhysicalProblemData{
        depth, final_time, groundheat::MaterialParams(kappa, c), constant_series(final_time, air),
        constant_series(final_time, flux), constant_series(final_time, deep), std::move(initial)});
}

inline groundheat::ReferenceScales unit_refs() { return groundheat::ReferenceScales(1.0, 1.0, 1.0, 1.0, 1.0); }

inline groundheat::DepthProfile sampled_profile(double depth, std::size_t n, double (*f)(double)) {
    std::vector<double> x = groundheat::uniform_grid(depth, n);
    std::vector<double> v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = f(x[i]);
    return groundheat::DepthProfile(x, v);
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
