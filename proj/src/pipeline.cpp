#include "groundheat/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include "groundheat/diagnostics.hpp"
#include "groundheat/parallel.hpp"
#include "groundheat/sensitivity.hpp"

namespace groundheat {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return hex.str();
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void write_json(const fs::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

// Numbers in JSON go through the same shortest round-trip formatting as the CSVs.
json number(double v) { return json::parse(io::format_double(v)); }

json numbers(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

std::uint64_t run_seed(const RunOptions& o, const RunConfig& c) { return o.seed.value_or(c.mcmc.seed); }

void write_manifest(const RunOptions& o, const std::string& stage, std::uint64_t seed, const std::string& started,
                    std::vector<fs::path>& outputs) {
    const fs::path path = o.out_dir / "manifest.json";
    json files = json::array();
    for (const auto& p : outputs) files.push_back(p.filename().string());
    files.push_back(path.filename().string());
    write_json(path, json{{"stage", stage},
                          {"command", o.command},
                          {"config", o.config.string()},
                          {"config_sha256", sha256_file(o.config)},
                          {"seed", seed},
                          {"started_utc", started},
                          {"finished_utc", utc_now()},
                          {"outputs", files}});
    outputs.push_back(path);
}

void write_summary(const fs::path& path, const PosteriorSummary& s, const std::string& mode, std::size_t chains,
                   std::size_t states, const std::vector<std::uint64_t>& seeds) {
    json j{{"names", s.names},
           {"mean", numbers(s.mean)},
           {"std", numbers(s.std)},
           {"acceptance_rate", number(s.acceptance_rate)},
           {"burn_in", s.burn_in},
           {"mode", mode},
           {"chains", chains},
           {"states", states},
           {"seeds", seeds}};
    write_json(path, j);
}

void write_residuals(const fs::path& path, const MeasurementSet& data, const Eigen::MatrixXd& predicted) {
    auto out = open_out(path);
    out << "time_s,depth_m,measured_K,predicted_K,residual_K\n";
    const Eigen::MatrixXd& y = data.temperatures();
    for (std::size_t k = 0; k < data.observations(); ++k)
        for (std::size_t i = 0; i < data.sensors(); ++i) {
            const auto r = static_cast<long>(i);
            const auto c = static_cast<long>(k);
            out << io::format_double(data.times()[k]) << ',' << io::format_double(data.depths()[i]) << ','
                << io::format_double(y(r, c)) << ',' << io::format_double(predicted(r, c)) << ','
                << io::format_double(y(r, c) - predicted(r, c)) << '\n';
        }
}

json residual_json(const ResidualReport& r, const MeasurementSet& data) {
    return json{{"depths_m", numbers(data.depths())},
                {"max_abs_K", numbers(r.max_abs)},
                {"max_relative_pct", numbers(r.max_relative_pct)},
                {"within_sigma", numbers(r.within_sigma)},
                {"within_sigma_total", number(r.within_sigma_total)},
                {"noise_std_K", number(data.noise_std())}};
}

const MeasurementSet& require_measurements(const Inputs& in, std::optional<MeasurementSet>& holder) {
    if (in.measurements) return *in.measurements;
    holder = twin_measurements(in);
    return *holder;
}

fs::path chain_input(const RunOptions& o) {
    if (o.chain) return *o.chain;
    if (fs::exists(o.out_dir / "chain.csv")) return o.out_dir / "chain.csv";
    return o.out_dir / "chain_0.csv";
}

// Parameter vector for the physical part of a chain summary or the config.
std::vector<double> physical_values(const Inputs& in, const std::optional<PosteriorSummary>& summary) {
    const std::size_t nt = in.config.h_breakpoints.size() - 1;
    if (summary) {
        if (summary->mean.size() < 2 + nt)
            throw ConfigError("surface_h.breakpoints_s", "chain has fewer h columns than the configured partition");
        return {summary->mean.begin(), summary->mean.begin() + static_cast<long>(2 + nt)};
    }
    std::vector<double> v{in.config.kappa, in.config.heat_capacity};
    v.insert(v.end(), in.config.h_values.begin(), in.config.h_values.end());
    return v;
}

}  // namespace

Inputs load_inputs(const RunOptions& o) {
    RunConfig c = load_config(o.config);
    if (o.data_dir) {
        const auto pick = [&](std::optional<fs::path>& slot, const char* name) {
            const fs::path p = *o.data_dir / name;
            if (fs::exists(p)) slot = p;
        };
        pick(c.data.air_temperature, "air_temperature.csv");
        pick(c.data.net_radiation, "net_radiation.csv");
        pick(c.data.deep_temperature, "deep_temperature.csv");
        pick(c.data.measurements, "measurements.csv");
        pick(c.data.initial_profile, "initial_profile.csv");
        pick(c.data.wind, "wind.csv");
    }

    const int given = int(c.data.air_temperature.has_value()) + int(c.data.net_radiation.has_value()) +
                      int(c.data.deep_temperature.has_value());
    if (given != 0 && given != 3) {
        if (!c.data.air_temperature) throw ConfigError("data.air_temperature", "required with the other boundary series");
        if (!c.data.net_radiation) throw ConfigError("data.net_radiation", "required with the other boundary series");
        throw ConfigError("data.deep_temperature", "required with the other boundary series");
    }

    const io::Forcing synthetic = io::synthetic_forcing(c.final_time, c.depth);
    TimeSeries air = synthetic.air_temperature;
    TimeSeries net = synthetic.net_radiation;
    TimeSeries deep = synthetic.deep_temperature;
    if (given == 3) {
        air = io::load_series(*c.data.air_temperature, io::SeriesRole::Temperature, o.units);
        net = io::load_series(*c.data.net_radiation, io::SeriesRole::Flux, o.units);
        deep = io::load_series(*c.data.deep_temperature, io::SeriesRole::Temperature, o.units);
    }
    if (o.filter_radiation) {
        if (!(*o.filter_radiation > 0)) throw ConfigError("--filter-radiation", "window must be positive");
        net = io::moving_average(net, *o.filter_radiation);
    }

    std::optional<MeasurementSet> measurements;
    if (c.data.measurements)
        measurements = io::load_measurements(*c.data.measurements, c.data.noise_std.value_or(0.25), o.units);

    DepthProfile initial = synthetic.initial_profile;
    if (c.data.initial_profile) {
        initial = io::load_profile(*c.data.initial_profile, o.units);
    } else if (measurements && measurements->times().front() == 0.0) {
        std::vector<double> t0(measurements->sensors());
        for (std::size_t i = 0; i < t0.size(); ++i) t0[i] = measurements->temperatures()(static_cast<long>(i), 0);
        initial = io::initial_profile_from_sensors(measurements->depths(), t0, c.depth);
    } else if (given == 3) {
        throw ConfigError("data.initial_profile", "needed when measurements do not start at t = 0");
    }

    std::optional<TimeSeries> wind;
    if (c.data.wind) wind = io::load_series(*c.data.wind, io::SeriesRole::Velocity, o.units);

    PhysicalProblem problem(PhysicalProblemData{c.depth, c.final_time, c.material(), std::move(air), std::move(net),
                                                std::move(deep), std::move(initial)});
    if (measurements) measurements->check_within(c.depth, c.final_time);
    ReferenceScales refs = c.reference_scales();
    SolverSettings settings = c.solver_settings(problem);
    return Inputs{std::move(c), std::move(problem), refs, settings, std::move(measurements), std::move(wind)};
}

MeasurementSet twin_measurements(const Inputs& in) {
    const RunConfig& c = in.config;
    io::TwinSpec spec{c.material(), c.twin_surface_coefficient(), c.twin.sensor_depths, c.twin.cadence,
                      c.twin.noise_std, c.twin.seed};
    return io::generate_twin_data(spec, in.problem, in.refs, in.settings);
}

EstimationSetup make_estimation(const Inputs& in, PriorMode mode, const MeasurementSet& data) {
    const RunConfig& c = in.config;
    const std::size_t nt = c.h_breakpoints.size() - 1;
    const PriorConfig& p = c.priors;

    GaussianPrior gaussian{{p.kappa_mean, p.C_mean}, {p.kappa_std, p.C_std}, true};
    std::optional<SmoothnessPrior> smoothness;
    const double gamma0 = c.gamma0.value_or(2.22);
    if (mode == PriorMode::CaseAB) {
        gaussian.mean.insert(gaussian.mean.end(), nt, p.h_mean);
        gaussian.std.insert(gaussian.std.end(), nt, p.h_std);
    } else {
        smoothness = SmoothnessPrior{nt, gamma0};
    }
    PosteriorModel model(in.problem, in.refs, in.settings, data, c.h_breakpoints, mode, gaussian, smoothness);
    const ParameterLayout& layout = model.layout();
    const std::size_t dim = layout.size();

    std::vector<double> initial{p.kappa_mean, p.C_mean};
    initial.insert(initial.end(), nt, p.h_mean);
    std::vector<double> scale = initial;
    if (layout.has_gamma()) {
        initial.push_back(gamma0);
        scale.push_back(gamma0);
    }

    std::vector<double> omega;
    if (c.mcmc.omega.size() == 1) omega.assign(dim, c.mcmc.omega.front());
    else if (c.mcmc.omega.size() == dim) omega = c.mcmc.omega;
    else throw ConfigError("mcmc.omega", "expected 1 or " + std::to_string(dim) + " values for mode " + to_string(mode));
    if (c.mcmc.omega_kappa) omega[ParameterLayout::conductivity_index] = *c.mcmc.omega_kappa;
    if (c.mcmc.omega_C) omega[ParameterLayout::heat_capacity_index] = *c.mcmc.omega_C;
    if (c.mcmc.omega_h)
        for (std::size_t i = 0; i < nt; ++i) omega[layout.h_index(i)] = *c.mcmc.omega_h;
    if (c.mcmc.omega_gamma && layout.has_gamma()) omega[layout.gamma_index()] = *c.mcmc.omega_gamma;

    MHConfig mh{c.mcmc.n_states, omega, scale, c.mcmc.seed, c.mcmc.burn_in};
    return EstimationSetup{std::move(model), std::move(mh), std::move(initial)};
}

std::vector<fs::path> run_forward(const RunOptions& o) {
    const std::string started = utc_now();
    const Inputs in = load_inputs(o);
    fs::create_directories(o.out_dir);
    const DimensionlessProblem dimless = nondimensionalize(in.problem, in.refs, in.config.surface_coefficient());
    const TemperatureField field = solve_forward(dimless, in.settings);

    std::vector<fs::path> outputs;
    const std::vector<double> times = io::observation_times(in.config.final_time, in.config.twin.cadence);
    const MeasurementSet sensors(in.config.twin.sensor_depths, times,
                                 Eigen::MatrixXd::Zero(static_cast<long>(in.config.twin.sensor_depths.size()),
                                                       static_cast<long>(times.size())),
                                 in.config.twin.noise_std);
    const fs::path sensors_path = o.out_dir / "sensors.csv";
    io::write_measurements(sensors_path, sensors.with_temperatures(predict_at_sensors(field, sensors)));
    outputs.push_back(sensors_path);

    // Field at roughly the observation cadence.
    const auto stride = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(in.config.twin.cadence / in.settings.time_step)));
    const fs::path field_path = o.out_dir / "field.csv";
    {
        auto out = open_out(field_path);
        out << "time_s,depth_m,temperature_K\n";
        const auto levels = static_cast<std::size_t>(field.values.cols());
        for (std::size_t n = 0; n < levels; ++n) {
            if (n % stride != 0 && n + 1 != levels) continue;
            for (std::size_t j = 0; j < field.positions.size(); ++j)
                out << io::format_double(field.times[n]) << ',' << io::format_double(field.positions[j]) << ','
                    << io::format_double(field.values(static_cast<long>(j), static_cast<long>(n))) << '\n';
        }
    }
    outputs.push_back(field_path);
    write_manifest(o, "forward", run_seed(o, in.config), started, outputs);
    return outputs;
}

std::vector<fs::path> run_sensitivity(const RunOptions& o) {
    const std::string started = utc_now();
    const Inputs in = load_inputs(o);
    fs::create_directories(o.out_dir);
    const RunConfig& c = in.config;
    const std::vector<double> times = io::observation_times(c.final_time, c.twin.cadence);
    const MeasurementSet sensors(
        c.twin.sensor_depths, times,
        Eigen::MatrixXd::Zero(static_cast<long>(c.twin.sensor_depths.size()), static_cast<long>(times.size())),
        c.twin.noise_std);
    const ParameterVector params = ParameterVector::pack(c.kappa, c.heat_capacity, c.h_values);
    const SensitivityMatrix x = sensitivities(in.problem, in.refs, in.settings, params, c.h_breakpoints, sensors, false);

    std::vector<fs::path> outputs;
    for (const bool reduced : {false, true}) {
        const fs::path path = o.out_dir / (reduced ? "sensitivity_reduced.csv" : "sensitivity.csv");
        auto out = open_out(path);
        out << "depth_m,parameter,time_s,value\n";
        for (std::size_t j = 0; j < x.parameters(); ++j)
            for (std::size_t i = 0; i < x.sensors(); ++i)
                for (std::size_t n = 0; n < x.times(); ++n) {
                    const double v = reduced ? x(i, j, n) * params[j] : x(i, j, n);
                    out << io::format_double(x.depths[i]) << ',' << x.names[j] << ','
                        << io::format_double(x.observation_times[n]) << ',' << io::format_double(v) << '\n';
                }
        outputs.push_back(path);
    }
    write_manifest(o, "sensitivity", run_seed(o, c), started, outputs);
    return outputs;
}

std::vector<fs::path> run_synth(const RunOptions& o) {
    const std::string started = utc_now();
    const Inputs in = load_inputs(o);
    fs::create_directories(o.out_dir);
    const MeasurementSet data = twin_measurements(in);

    std::vector<fs::path> outputs{o.out_dir / "measurements.csv", o.out_dir / "air_temperature.csv",
                                  o.out_dir / "net_radiation.csv", o.out_dir / "deep_temperature.csv",
                                  o.out_dir / "initial_profile.csv"};
    io::write_measurements(outputs[0], data);
    io::write_series(outputs[1], in.problem.air_temperature());
    io::write_series(outputs[2], in.problem.net_radiation());
    io::write_series(outputs[3], in.problem.deep_temperature());
    io::write_profile(outputs[4], in.problem.initial_profile());
    write_manifest(o, "synth", in.config.twin.seed, started, outputs);
    return outputs;
}

std::vector<fs::path> run_estimation(const RunOptions& o) {
    const std::string started = utc_now();
    const Inputs in = load_inputs(o);
    if (o.chains < 1) throw ConfigError("--chains", "must be at least 1");
    const PriorMode mode = o.mode.value_or(PriorMode::CaseAB);
    std::optional<MeasurementSet> twin;
    const MeasurementSet& data = require_measurements(in, twin);
    EstimationSetup setup = make_estimation(in, mode, data);
    setup.mh.seed = run_seed(o, in.config);
    setup.mh.validate(setup.initial.size());
    fs::create_directories(o.out_dir);

    const std::vector<std::string> names = setup.model.layout().names();
    const PosteriorModel& model = setup.model;
    const LogDensity density = [&model](std::span<const double> p) { return model.log_posterior(p); };

    std::vector<Chain> chains(o.chains);
    std::vector<std::uint64_t> seeds(o.chains);
    for (std::size_t k = 0; k < o.chains; ++k) seeds[k] = setup.mh.seed + k;
    parallel_for(o.chains, [&](std::size_t k) {
        MHConfig mh = setup.mh;
        mh.seed = seeds[k];
        chains[k] = run_chain(mh, density, setup.initial, names);
    });

    std::vector<fs::path> outputs;
    for (std::size_t k = 0; k < o.chains; ++k) {
        const fs::path path = o.out_dir / (o.chains == 1 ? "chain.csv" : "chain_" + std::to_string(k) + ".csv");
        io::write_chain(path, chains[k]);
        outputs.push_back(path);
    }

    // Pooled post-burn-in states.
    const std::size_t burn = setup.mh.burn_in;
    const std::size_t kept = chains.front().states() - burn;
    Chain pooled;
    pooled.names = names;
    pooled.samples.resize(static_cast<long>(kept * o.chains), static_cast<long>(names.size()));
    pooled.accepted.assign(kept * o.chains, 0);
    double rate = 0;
    for (std::size_t k = 0; k < o.chains; ++k) {
        pooled.samples.middleRows(static_cast<long>(k * kept), static_cast<long>(kept)) =
            chains[k].samples.bottomRows(static_cast<long>(kept));
        rate += acceptance_rate(chains[k]);
    }
    PosteriorSummary summary = summarize(pooled, 0);
    summary.acceptance_rate = rate / static_cast<double>(o.chains);
    summary.burn_in = burn;
    const fs::path summary_path = o.out_dir / "summary.json";
    write_summary(summary_path, summary, to_string(mode), o.chains, chains.front().states(), seeds);
    outputs.push_back(summary_path);

    const Eigen::MatrixXd predicted = model.predict(summary.mean);
    const fs::path residual_path = o.out_dir / "residuals.csv";
    write_residuals(residual_path, data, predicted);
    outputs.push_back(residual_path);

    if (in.wind) {
        const SurfaceCoefficient h(in.config.h_breakpoints,
                                   std::vector<double>(summary.mean.begin() + 2,
                                                       summary.mean.begin() + 2 +
                                                           static_cast<long>(in.config.h_breakpoints.size() - 1)));
        const fs::path path = o.out_dir / "h_comparison.csv";
        auto out = open_out(path);
        out << "time_s,wind_m_s,h_wind,h_posterior\n";
        for (std::size_t i = 0; i < in.wind->size(); ++i) {
            const double t = in.wind->times()[i];
            if (t < 0 || t > in.config.final_time) continue;
            const double v = in.wind->values()[i];
            out << io::format_double(t) << ',' << io::format_double(v) << ','
                << io::format_double(io::empirical_h_from_wind(std::max(v, 0.0))) << ','
                << io::format_double(evaluate_surface_coefficient(h, t)) << '\n';
        }
        outputs.push_back(path);
    }
    write_manifest(o, "estimate", setup.mh.seed, started, outputs);
    return outputs;
}

std::vector<fs::path> run_diagnose(const RunOptions& o) {
    const std::string started = utc_now();
    const RunConfig c = load_config(o.config);
    const Chain chain = io::load_chain(chain_input(o));
    if (c.mcmc.burn_in >= chain.states())
        throw ConfigError("mcmc.burn_in", "not smaller than the chain length " + std::to_string(chain.states()));
    fs::create_directories(o.out_dir);
    const std::size_t burn = c.mcmc.burn_in;
    const PosteriorSummary summary = summarize(chain, burn);
    const std::vector<double> geweke = geweke_relative_difference(chain, burn);

    std::vector<Autocorrelation> acf;
    json iact = json::object();
    bool acf_ok = true;
    for (std::size_t j = 0; j < chain.dimension(); ++j) {
        try {
            acf.push_back(autocovariance_and_iact(chain, j, burn));
            iact[chain.names[j]] = json{{"iact", number(acf.back().iact)}, {"window", acf.back().window}};
        } catch (const std::invalid_argument& e) {
            spdlog::warn("autocorrelation of {} skipped: {}", chain.names[j], e.what());
            iact[chain.names[j]] = nullptr;
            acf_ok = false;
        }
    }

    std::vector<fs::path> outputs;
    const fs::path diag_path = o.out_dir / "diagnostics.json";
    json geweke_json = json::object();
    for (std::size_t j = 0; j < chain.dimension(); ++j) geweke_json[chain.names[j]] = number(geweke[j]);
    write_json(diag_path, json{{"names", summary.names},
                               {"mean", numbers(summary.mean)},
                               {"std", numbers(summary.std)},
                               {"acceptance_rate", number(summary.acceptance_rate)},
                               {"burn_in", summary.burn_in},
                               {"geweke_relative_difference", geweke_json},
                               {"autocorrelation", iact}});
    outputs.push_back(diag_path);

    const fs::path geweke_path = o.out_dir / "geweke.csv";
    {
        auto out = open_out(geweke_path);
        out << "parameter,relative_difference\n";
        for (std::size_t j = 0; j < chain.dimension(); ++j)
            out << chain.names[j] << ',' << io::format_double(geweke[j]) << '\n';
    }
    outputs.push_back(geweke_path);

    if (acf_ok && !acf.empty()) {
        const fs::path path = o.out_dir / "autocovariance.csv";
        const std::vector<double> norm = autocovariance_norm(acf);
        auto out = open_out(path);
        out << "lag";
        for (const auto& n : chain.names) out << ',' << n;
        out << ",norm\n";
        for (std::size_t k = 0; k < norm.size(); ++k) {
            out << k;
            for (const auto& a : acf) out << ',' << io::format_double(a.autocovariance[k]);
            out << ',' << io::format_double(norm[k]) << '\n';
        }
        outputs.push_back(path);
    }

    const fs::path hist_path = o.out_dir / "histograms.csv";
    {
        auto out = open_out(hist_path);
        out << "parameter,bin_lo,bin_hi,count\n";
        for (std::size_t j = 0; j < chain.dimension(); ++j) {
            const Histogram h = histogram(chain, j, burn);
            for (std::size_t b = 0; b < h.counts.size(); ++b)
                out << chain.names[j] << ',' << io::format_double(h.edges[b]) << ','
                    << io::format_double(h.edges[b + 1]) << ',' << h.counts[b] << '\n';
        }
    }
    outputs.push_back(hist_path);

    // Trace of the whole chain, thinned to about 10k rows.
    const fs::path trace_path = o.out_dir / "trace.csv";
    {
        const std::size_t stride = std::max<std::size_t>(1, chain.states() / 10000);
        auto out = open_out(trace_path);
        out << "index";
        for (const auto& n : chain.names) out << ',' << n;
        out << ",log_posterior\n";
        for (std::size_t k = 0; k < chain.states(); k += stride) {
            out << k;
            for (std::size_t j = 0; j < chain.dimension(); ++j)
                out << ',' << io::format_double(chain.samples(static_cast<long>(k), static_cast<long>(j)));
            out << ',' << io::format_double(chain.log_posterior[k]) << '\n';
        }
    }
    outputs.push_back(trace_path);

    const Inputs in = load_inputs(o);
    std::optional<MeasurementSet> twin;
    const MeasurementSet& data = require_measurements(in, twin);
    const Eigen::MatrixXd predicted = predict_temperatures(in.problem, in.refs, in.settings, physical_values(in, summary),
                                                           in.config.h_breakpoints, data);
    const fs::path residual_path = o.out_dir / "residuals.csv";
    write_residuals(residual_path, data, predicted);
    outputs.push_back(residual_path);
    write_manifest(o, "diagnose", run_seed(o, c), started, outputs);
    return outputs;
}

std::vector<fs::path> run_residuals(const RunOptions& o) {
    const std::string started = utc_now();
    const Inputs in = load_inputs(o);
    std::optional<MeasurementSet> twin;
    const MeasurementSet& data = require_measurements(in, twin);

    std::optional<PosteriorSummary> summary;
    const fs::path chain_path = chain_input(o);
    std::uint64_t seed = run_seed(o, in.config);
    if (fs::exists(chain_path)) {
        const Chain chain = io::load_chain(chain_path);
        const std::size_t burn = in.config.mcmc.burn_in < chain.states() ? in.config.mcmc.burn_in : 0;
        summary = summarize(chain, burn);
    }
    const std::vector<double> p = physical_values(in, summary);
    const Eigen::MatrixXd predicted =
        predict_temperatures(in.problem, in.refs, in.settings, p, in.config.h_breakpoints, data);
    const ResidualReport report = residual_report(data.temperatures(), predicted, data.noise_std());

    fs::create_directories(o.out_dir);
    std::vector<fs::path> outputs{o.out_dir / "residuals.csv", o.out_dir / "residual_summary.json"};
    write_residuals(outputs[0], data, predicted);
    json j = residual_json(report, data);
    j["parameters"] = summary ? "posterior_mean" : "config";
    write_json(outputs[1], j);
    write_manifest(o, "residuals", seed, started, outputs);
    return outputs;
}

int run_stage(const std::string& stage, const RunOptions& o) {
    try {
        if (stage == "forward") run_forward(o);
        else if (stage == "sensitivity") run_sensitivity(o);
        else if (stage == "synth") run_synth(o);
        else if (stage == "estimate") run_estimation(o);
        else if (stage == "diagnose") run_diagnose(o);
        else if (stage == "residuals") run_residuals(o);
        else throw ConfigError("<command>", "unknown stage '" + stage + "'");
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: invalid input: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace groundheat
