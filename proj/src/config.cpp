#include "groundheat/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace groundheat {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"geometry", {"L_m", "t_f_s"}},
        {"material", {"kappa", "C"}},
        {"surface_h", {"breakpoints_s", "n_intervals", "values"}},
        {"priors", {"kappa_mean", "kappa_std", "C_mean", "C_std", "h_mean", "h_std"}},
        {"mcmc", {"n_states", "omega", "seed", "burn_in", "omega_kappa", "omega_C", "omega_h", "omega_gamma"}},
        {"smoothness", {"gamma0"}},
        {"solver", {"nodes", "dt_s", "bootstrap"}},
        {"references", {"t_ref_s", "T_ref_K", "kappa_ref", "C_ref", "h_ref"}},
        {"data",
         {"air_temperature", "net_radiation", "deep_temperature", "measurements", "initial_profile", "wind",
          "noise_std_K"}},
        {"twin", {"sensor_depths_m", "cadence_s", "noise_std_K", "seed", "h_breakpoints_s", "h_values"}},
    };
    return keys;
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    std::optional<std::string> text(const std::string& key) const {
        auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
        if (!v) return std::nullopt;
        return trim(*v);
    }

    std::optional<double> number(const std::string& key) const {
        auto t = text(key);
        if (!t) return std::nullopt;
        return parse_number(key, *t);
    }

    std::optional<double> positive(const std::string& key) const {
        auto v = number(key);
        if (v && !(*v > 0)) throw ConfigError(key, "must be positive");
        return v;
    }

    std::optional<std::uint64_t> integer(const std::string& key) const {
        auto t = text(key);
        if (!t) return std::nullopt;
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(t->data(), t->data() + t->size(), v);
        if (ec != std::errc() || ptr != t->data() + t->size())
            throw ConfigError(key, "expected a non-negative integer, got '" + *t + "'");
        return v;
    }

    std::optional<std::vector<double>> list(const std::string& key) const {
        auto t = text(key);
        if (!t) return std::nullopt;
        std::vector<double> out;
        std::stringstream ss(*t);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) throw ConfigError(key, "empty list entry");
            out.push_back(parse_number(key, item));
        }
        if (out.empty()) throw ConfigError(key, "empty list");
        return out;
    }

private:
    static double parse_number(const std::string& key, const std::string& t) {
        double v = 0;
        const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
            throw ConfigError(key, "expected a finite number, got '" + t + "'");
        return v;
    }

    const pt::ptree& tree_;
};

template <class T>
void assign(std::optional<T> v, T& target) {
    if (v) target = *v;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

SurfaceCoefficient RunConfig::surface_coefficient() const {
    try {
        return SurfaceCoefficient(h_breakpoints, h_values);
    } catch (const DomainError& e) {
        throw ConfigError("surface_h.values", e.what());
    }
}

SurfaceCoefficient RunConfig::twin_surface_coefficient() const {
    if (!twin.h_values) return surface_coefficient();
    std::vector<double> b = twin.h_breakpoints ? *twin.h_breakpoints : h_breakpoints;
    std::vector<double> v = *twin.h_values;
    if (v.size() == 1 && b.size() > 2) v.assign(b.size() - 1, v.front());
    try {
        return SurfaceCoefficient(std::move(b), std::move(v));
    } catch (const DomainError& e) {
        throw ConfigError("twin.h_values", e.what());
    }
}

ReferenceScales RunConfig::reference_scales() const {
    return ReferenceScales(references.time.value_or(3600.0), references.temperature.value_or(300.0),
                           references.conductivity.value_or(priors.kappa_mean),
                           references.heat_capacity.value_or(priors.C_mean),
                           references.heat_transfer.value_or(priors.h_mean));
}

SolverSettings RunConfig::solver_settings(const PhysicalProblem& problem) const {
    SolverSettings s = dt ? SolverSettings{nodes, *dt, bootstrap} : SolverSettings::stable_default(problem, nodes);
    s.bootstrap = bootstrap;
    try {
        s.steps(problem.final_time());
    } catch (const DomainError& e) {
        throw ConfigError("solver.dt_s", e.what());
    }
    return s.with_bootstrap_headroom(problem);
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("<file>", e.message() + " at line " + std::to_string(e.line()));
    }
    for (const auto& [section, body] : tree) {
        const auto it = known_keys().find(section);
        if (it == known_keys().end()) throw ConfigError(section, "unknown section");
        if (!body.data().empty() && body.empty()) throw ConfigError(section, "key outside any section");
        for (const auto& [key, value] : body)
            if (!it->second.contains(key)) throw ConfigError(section + "." + key, "unknown key");
    }

    const Reader r(tree);
    RunConfig c;
    assign(r.positive("geometry.L_m"), c.depth);
    assign(r.positive("geometry.t_f_s"), c.final_time);
    assign(r.positive("material.kappa"), c.kappa);
    assign(r.positive("material.C"), c.heat_capacity);

    assign(r.positive("priors.kappa_mean"), c.priors.kappa_mean);
    assign(r.positive("priors.kappa_std"), c.priors.kappa_std);
    assign(r.positive("priors.C_mean"), c.priors.C_mean);
    assign(r.positive("priors.C_std"), c.priors.C_std);
    assign(r.positive("priors.h_mean"), c.priors.h_mean);
    assign(r.positive("priors.h_std"), c.priors.h_std);

    // Partition: explicit breakpoints, uniform count, or the three-interval default.
    if (auto b = r.list("surface_h.breakpoints_s")) {
        c.h_breakpoints = *b;
        if (r.text("surface_h.n_intervals")) throw ConfigError("surface_h.n_intervals", "conflicts with breakpoints_s");
    } else if (auto n = r.integer("surface_h.n_intervals")) {
        if (*n == 0) throw ConfigError("surface_h.n_intervals", "must be at least 1");
        c.h_breakpoints = build_uniform_partition(c.final_time, *n);
    } else {
        c.h_breakpoints = build_uniform_partition(c.final_time, 1);
    }
    if (c.h_breakpoints.size() < 2) throw ConfigError("surface_h.breakpoints_s", "needs at least 2 breakpoints");
    if (std::abs(c.h_breakpoints.back() - c.final_time) > 1e-9 * c.final_time)
        throw ConfigError("surface_h.breakpoints_s", "last breakpoint must equal geometry.t_f_s");
    c.h_breakpoints.back() = c.final_time;
    const std::size_t nt = c.h_breakpoints.size() - 1;
    if (auto v = r.list("surface_h.values")) {
        if (v->size() == 1) c.h_values.assign(nt, v->front());
        else if (v->size() == nt) c.h_values = *v;
        else throw ConfigError("surface_h.values", "expected 1 or " + std::to_string(nt) + " values");
    } else {
        c.h_values.assign(nt, c.priors.h_mean);
    }
    c.surface_coefficient();

    if (auto v = r.list("mcmc.omega")) {
        for (double w : *v)
            if (!(w >= 0)) throw ConfigError("mcmc.omega", "must be non-negative");
        c.mcmc.omega = *v;
    }
    for (auto [key, slot] : {std::pair{"mcmc.omega_kappa", &c.mcmc.omega_kappa}, std::pair{"mcmc.omega_C", &c.mcmc.omega_C},
                             std::pair{"mcmc.omega_h", &c.mcmc.omega_h}, std::pair{"mcmc.omega_gamma", &c.mcmc.omega_gamma}}) {
        if (auto w = r.number(key)) {
            if (!(*w >= 0)) throw ConfigError(key, "must be non-negative");
            *slot = *w;
        }
    }
    if (auto n = r.integer("mcmc.n_states")) c.mcmc.n_states = *n;
    if (c.mcmc.n_states < 1) throw ConfigError("mcmc.n_states", "must be at least 1");
    assign(r.integer("mcmc.seed"), c.mcmc.seed);
    if (auto b = r.integer("mcmc.burn_in")) c.mcmc.burn_in = *b;
    if (c.mcmc.burn_in >= c.mcmc.n_states) {
        if (r.text("mcmc.burn_in")) throw ConfigError("mcmc.burn_in", "must be smaller than mcmc.n_states");
        c.mcmc.burn_in = c.mcmc.n_states / 2;
    }

    c.gamma0 = r.positive("smoothness.gamma0");

    if (auto n = r.integer("solver.nodes")) {
        if (*n < 4) throw ConfigError("solver.nodes", "must be at least 4");
        c.nodes = *n;
    }
    c.dt = r.positive("solver.dt_s");
    if (auto b = r.text("solver.bootstrap")) {
        if (*b == "substepped") c.bootstrap = Bootstrap::SubsteppedEuler;
        else if (*b == "single") c.bootstrap = Bootstrap::SingleEuler;
        else throw ConfigError("solver.bootstrap", "expected 'substepped' or 'single'");
    }

    c.references.time = r.positive("references.t_ref_s");
    c.references.temperature = r.positive("references.T_ref_K");
    c.references.conductivity = r.positive("references.kappa_ref");
    c.references.heat_capacity = r.positive("references.C_ref");
    c.references.heat_transfer = r.positive("references.h_ref");

    for (auto [key, slot] : {std::pair{"data.air_temperature", &c.data.air_temperature},
                             std::pair{"data.net_radiation", &c.data.net_radiation},
                             std::pair{"data.deep_temperature", &c.data.deep_temperature},
                             std::pair{"data.measurements", &c.data.measurements},
                             std::pair{"data.initial_profile", &c.data.initial_profile},
                             std::pair{"data.wind", &c.data.wind}}) {
        if (auto p = r.text(key)) {
            if (p->empty()) throw ConfigError(key, "empty path");
            *slot = resolve(base_dir, *p);
        }
    }
    c.data.noise_std = r.positive("data.noise_std_K");

    assign(r.list("twin.sensor_depths_m"), c.twin.sensor_depths);
    for (double d : c.twin.sensor_depths)
        if (d < 0 || d > c.depth) throw ConfigError("twin.sensor_depths_m", "depths must lie in [0, L_m]");
    assign(r.positive("twin.cadence_s"), c.twin.cadence);
    if (auto s = r.number("twin.noise_std_K")) {
        if (!(*s >= 0)) throw ConfigError("twin.noise_std_K", "must be non-negative");
        c.twin.noise_std = *s;
    }
    assign(r.integer("twin.seed"), c.twin.seed);
    c.twin.h_breakpoints = r.list("twin.h_breakpoints_s");
    c.twin.h_values = r.list("twin.h_values");
    if (c.twin.h_breakpoints && !c.twin.h_values)
        throw ConfigError("twin.h_values", "required when twin.h_breakpoints_s is given");
    if (c.twin.h_values) c.twin_surface_coefficient();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

}  // namespace groundheat
