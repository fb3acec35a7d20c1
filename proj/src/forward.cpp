#include "groundheat/forward.hpp"

#include <algorithm>
#include <cmath>

namespace groundheat {

namespace {

/// Monotone linear-interpolation cursor for increasing query times.
class SeriesCursor {
public:
    explicit SeriesCursor(const TimeSeries& s) : t_(s.times()), v_(s.values()) {}

    double at(double t) {
        if (t <= t_.front()) return v_.front();
        if (t >= t_.back()) return v_.back();
        while (t_[k_ + 1] < t) ++k_;
        const double w = (t - t_[k_]) / (t_[k_ + 1] - t_[k_]);
        return v_[k_] + w * (v_[k_ + 1] - v_[k_]);
    }

private:
    const std::vector<double>& t_;
    const std::vector<double>& v_;
    std::size_t k_ = 0;
};

/// Piecewise-constant lookup for increasing query times.
class StepCursor {
public:
    explicit StepCursor(const SurfaceCoefficient& h) : b_(h.breakpoints()), v_(h.values()) {}

    double at(double t) {
        while (k_ + 1 < v_.size() && b_[k_ + 1] <= t) ++k_;
        return v_[k_];
    }

private:
    const std::vector<double>& b_;
    const std::vector<double>& v_;
    std::size_t k_ = 0;
};

struct Bracket {
    std::size_t index;
    double weight;
};

// Cell [grid[k], grid[k+1]] containing v and the fractional position inside it.
Bracket locate(const std::vector<double>& grid, double v, const char* what) {
    const double lo = grid.front();
    const double hi = grid.back();
    const double slack = 1e-9 * std::max(std::abs(hi), 1.0);
    if (!(v >= lo - slack && v <= hi + slack)) throw DomainError(what);
    const std::size_t cells = grid.size() - 1;
    if (v >= hi) return {cells - 1, 1.0};
    if (v <= lo) return {0, 0.0};
    auto k = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), v) - grid.begin()) - 1;
    k = std::min(k, cells - 1);
    return {k, (v - grid[k]) / (grid[k + 1] - grid[k])};
}

double bilinear(double a00, double a10, double a01, double a11, double wx, double wt) {
    return (1.0 - wt) * ((1.0 - wx) * a00 + wx * a10) + wt * ((1.0 - wx) * a01 + wx * a11);
}

void check_level(const std::vector<double>& u, std::size_t level) {
    double sum = 0;
    for (double x : u) sum += x;
    if (std::isfinite(sum)) return;
    for (std::size_t j = 0; j < u.size(); ++j)
        if (!std::isfinite(u[j])) throw NumericalFailure(j, level);
    throw NumericalFailure(0, level);
}

/// Marches the scheme and hands each new level to `sink(n, level_n, level_{n-1})`.
/// Level 0 is reported with an empty previous level.
template <class Sink>
void march(const DimensionlessProblem& p, const SolverSettings& settings, Sink&& sink) {
    const double tf_phys = p.final_time * p.time_scale;
    const std::size_t steps = settings.steps(tf_phys);
    const std::size_t J = settings.nodes - 1;
    const double dx = 1.0 / static_cast<double>(J);
    const double dt = p.final_time / static_cast<double>(steps);
    const double a = p.diffusivity();
    const double r = a * dt / (dx * dx);
    const double k_over_dx = p.conductivity_ratio / dx;

    SeriesCursor air(p.air);
    SeriesCursor deep(p.deep);
    SeriesCursor flux(p.flux);
    StepCursor hcoef(p.h);

    // Surface node from the one-sided flux balance k(U1 − U0)/Δx = h*Bi(U0 − U∞) − q*.
    auto robin = [&](double u1, double t_new, double t_mid) {
        const double hb = hcoef.at(t_mid) * p.biot;
        return (k_over_dx * u1 + hb * air.at(t_new) + flux.at(t_new)) / (k_over_dx + hb);
    };

    std::vector<double> prev(J + 1);
    std::vector<double> cur(J + 1);
    std::vector<double> next(J + 1);
    for (std::size_t j = 0; j <= J; ++j) cur[j] = p.initial.at(static_cast<double>(j) * dx);
    check_level(cur, 0);
    sink(std::size_t{0}, cur, std::vector<double>{});

    // First step: forward Euler, optionally sub-stepped.
    {
        std::size_t sub = 1;
        if (settings.bootstrap == Bootstrap::SubsteppedEuler) {
            sub = std::max<std::size_t>(settings.bootstrap_substeps, 1);
            if (r / static_cast<double>(sub) > 0.5) sub = static_cast<std::size_t>(std::ceil(r / 0.5));
        }
        const double ds = dt / static_cast<double>(sub);
        const double rs = r / static_cast<double>(sub);
        std::vector<double> u = cur;
        std::vector<double> w(J + 1);
        for (std::size_t s = 0; s < sub; ++s) {
            for (std::size_t j = 1; j < J; ++j) w[j] = u[j] + rs * (u[j + 1] - 2.0 * u[j] + u[j - 1]);
            const double t_new = (s + 1 == sub) ? dt : static_cast<double>(s + 1) * ds;
            w[J] = deep.at(t_new);
            w[0] = robin(w[1], t_new, (static_cast<double>(s) + 0.5) * ds);
            std::swap(u, w);
        }
        prev.swap(cur);
        cur = std::move(u);
        check_level(cur, 1);
        sink(std::size_t{1}, cur, prev);
    }

    const double c_old = (1.0 - 2.0 * r) / (1.0 + 2.0 * r);
    const double c_nbr = 2.0 * r / (1.0 + 2.0 * r);
    for (std::size_t n = 1; n < steps; ++n) {
        for (std::size_t j = 1; j < J; ++j) next[j] = c_old * prev[j] + c_nbr * (cur[j + 1] + cur[j - 1]);
        const double t_new = static_cast<double>(n + 1) * dt;
        next[J] = deep.at(t_new);
        next[0] = robin(next[1], t_new, (static_cast<double>(n) + 0.5) * dt);
        check_level(next, n + 1);
        std::swap(prev, cur);
        std::swap(cur, next);
        sink(n + 1, cur, prev);
    }
}

}  // namespace

std::vector<double> uniform_grid(double extent, std::size_t intervals) {
    std::vector<double> g(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i)
        g[i] = extent * static_cast<double>(i) / static_cast<double>(intervals);
    g.back() = extent;
    return g;
}

DimensionlessProblem nondimensionalize(const PhysicalProblem& problem, const ReferenceScales& refs,
                                       const SurfaceCoefficient& h) {
    const double L = problem.depth();
    const double tf = problem.final_time();
    const double slack = 1e-9 * tf;
    if (std::abs(h.final_time() - tf) > slack)
        throw DomainError("surface coefficient partition must end at t_f");
    const double inv_t = 1.0 / refs.time();
    const double inv_T = 1.0 / refs.temperature();
    return DimensionlessProblem{
        problem.material().conductivity() / refs.conductivity(),
        problem.material().heat_capacity() / refs.heat_capacity(),
        refs.fourier(L),
        refs.biot(L),
        tf / refs.time(),
        problem.air_temperature().scaled(inv_t, inv_T),
        problem.deep_temperature().scaled(inv_t, inv_T),
        problem.net_radiation().scaled(inv_t, L / (refs.conductivity() * refs.temperature())),
        h.scaled(inv_t, 1.0 / refs.heat_transfer()),
        problem.initial_profile().scaled(1.0 / L, inv_T),
        L,
        refs.time(),
        refs.temperature(),
    };
}

std::size_t SolverSettings::steps(double final_time) const {
    if (nodes < 4) throw DomainError("solver needs at least 4 nodes (J >= 3)");
    if (!(time_step > 0) || !std::isfinite(time_step)) throw DomainError("solver time step must be positive");
    const double ratio = final_time / time_step;
    const auto n = static_cast<std::size_t>(std::llround(ratio));
    if (n < 1 || std::abs(static_cast<double>(n) * time_step - final_time) > 1e-6 * final_time)
        throw DomainError("solver time step must divide the final time");
    return n;
}

SolverSettings SolverSettings::stable_default(const PhysicalProblem& problem, std::size_t nodes) {
    if (nodes < 4) throw DomainError("solver needs at least 4 nodes (J >= 3)");
    const double dx = problem.depth() / static_cast<double>(nodes - 1);
    const double alpha = problem.material().conductivity() / problem.material().heat_capacity();
    const double dt_max = 0.5 * dx * dx / alpha;
    const double tf = problem.final_time();
    const auto n = static_cast<std::size_t>(std::ceil(tf / dt_max));
    return SolverSettings{nodes, tf / static_cast<double>(std::max<std::size_t>(n, 1)),
                          Bootstrap::SubsteppedEuler};
}

SolverSettings SolverSettings::with_bootstrap_headroom(const PhysicalProblem& problem, double headroom) const {
    if (!(headroom >= 1)) throw DomainError("bootstrap headroom must be at least 1");
    if (nodes < 4) throw DomainError("solver needs at least 4 nodes (J >= 3)");
    const double dx = problem.depth() / static_cast<double>(nodes - 1);
    const double alpha = problem.material().conductivity() / problem.material().heat_capacity();
    const double r = headroom * alpha * time_step / (dx * dx);
    SolverSettings s = *this;
    s.bootstrap_substeps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(r / 0.5)));
    return s;
}

TemperatureField solve_forward(const DimensionlessProblem& dimless, const SolverSettings& settings) {
    const double tf = dimless.final_time * dimless.time_scale;
    const std::size_t steps = settings.steps(tf);
    TemperatureField field{uniform_grid(dimless.depth, settings.nodes - 1), uniform_grid(tf, steps),
                           Eigen::MatrixXd(settings.nodes, steps + 1)};
    const double T_ref = dimless.temperature_scale;
    march(dimless, settings, [&](std::size_t n, const std::vector<double>& u, const std::vector<double>&) {
        for (std::size_t j = 0; j < u.size(); ++j) field.values(j, n) = u[j] * T_ref;
    });
    return field;
}

Eigen::MatrixXd predict_at_sensors(const TemperatureField& field, const MeasurementSet& sensors) {
    Eigen::MatrixXd out(sensors.sensors(), sensors.observations());
    for (std::size_t m = 0; m < sensors.sensors(); ++m) {
        const Bracket bx = locate(field.positions, sensors.depths()[m], "sensor depth outside the slab");
        for (std::size_t o = 0; o < sensors.observations(); ++o) {
            const Bracket bt = locate(field.times, sensors.times()[o], "observation time outside [0, t_f]");
            const auto j = bx.index;
            const auto n = bt.index;
            out(m, o) = bilinear(field.values(j, n), field.values(j + 1, n), field.values(j, n + 1),
                                 field.values(j + 1, n + 1), bx.weight, bt.weight);
        }
    }
    return out;
}

Eigen::MatrixXd solve_at_sensors(const DimensionlessProblem& dimless, const SolverSettings& settings,
                                 const std::vector<double>& depths, const std::vector<double>& times) {
    const double tf = dimless.final_time * dimless.time_scale;
    const std::size_t steps = settings.steps(tf);
    const std::vector<double> positions = uniform_grid(dimless.depth, settings.nodes - 1);
    const std::vector<double> levels = uniform_grid(tf, steps);

    std::vector<Bracket> bx;
    bx.reserve(depths.size());
    for (double x : depths) bx.push_back(locate(positions, x, "sensor depth outside the slab"));

    // Observations grouped by the time cell they fall in.
    std::vector<std::pair<std::size_t, Bracket>> obs;
    obs.reserve(times.size());
    for (std::size_t o = 0; o < times.size(); ++o)
        obs.emplace_back(o, locate(levels, times[o], "observation time outside [0, t_f]"));
    std::stable_sort(obs.begin(), obs.end(),
                     [](const auto& a, const auto& b) { return a.second.index < b.second.index; });

    Eigen::MatrixXd out(depths.size(), times.size());
    const double T_ref = dimless.temperature_scale;
    std::size_t next_obs = 0;
    march(dimless, settings, [&](std::size_t n, const std::vector<double>& u, const std::vector<double>& u_prev) {
        if (n == 0) return;
        while (next_obs < obs.size() && obs[next_obs].second.index == n - 1) {
            const auto [o, bt] = obs[next_obs];
            for (std::size_t m = 0; m < bx.size(); ++m) {
                const auto j = bx[m].index;
                out(m, o) = bilinear(u_prev[j] * T_ref, u_prev[j + 1] * T_ref, u[j] * T_ref,
                                     u[j + 1] * T_ref, bx[m].weight, bt.weight);
            }
            ++next_obs;
        }
    });
    return out;
}

Eigen::MatrixXd predict_temperatures(const PhysicalProblem& problem, const ReferenceScales& refs,
                                     const SolverSettings& settings, std::span<const double> values,
                                     const std::vector<double>& breakpoints, const MeasurementSet& sensors) {
    if (values.size() + 1 < breakpoints.size() + 2)
        throw DomainError("parameter vector shorter than the h partition");
    const std::size_t nt = breakpoints.size() - 1;
    const MaterialParams material(values[0], values[1]);
    const SurfaceCoefficient h(breakpoints, std::vector<double>(values.begin() + 2, values.begin() + 2 + nt));
    const DimensionlessProblem dimless = nondimensionalize(problem.with_material(material), refs, h);
    return solve_at_sensors(dimless, settings, sensors.depths(), sensors.times());
}

}  // namespace groundheat
