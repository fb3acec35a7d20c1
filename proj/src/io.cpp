#include "groundheat/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace groundheat::io {

namespace {

constexpr double kKelvinOffset = 273.15;

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

/// Reads a CSV with the expected header; returns the numeric rows.
std::vector<std::vector<double>> read_table(const std::filesystem::path& path,
                                            const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");
    const std::string source = path.string();
    std::string line;
    if (!std::getline(in, line)) throw ParseError(source, 0, "empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto cols = split(line);
    for (auto& c : cols) c = trim(c);
    for (const auto& want : header)
        if (std::find(cols.begin(), cols.end(), want) == cols.end())
            throw ParseError(source, 0, "missing column '" + want + "'");
    if (cols != header) throw ParseError(source, 0, "unexpected header '" + line + "'");

    std::vector<std::vector<double>> rows;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (fields.size() != header.size())
            throw ParseError(source, row, "expected " + std::to_string(header.size()) + " fields");
        std::vector<double> values;
        for (const auto& f : fields) {
            const std::string t = trim(f);
            double v = 0;
            const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
            if (ec != std::errc() || ptr != t.data() + t.size())
                throw ParseError(source, row, "not a number: '" + t + "'");
            if (!std::isfinite(v)) throw ParseError(source, row, "non-finite value");
            values.push_back(v);
        }
        rows.push_back(std::move(values));
    }
    return rows;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

TimeSeries load_series(const std::filesystem::path& path, SeriesRole role, IngestUnits units) {
    const auto rows = read_table(path, {"time_s", "value"});
    std::vector<double> t;
    std::vector<double> v;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        double time = rows[r][0];
        double value = rows[r][1];
        if (units.hours) time *= 3600.0;
        if (units.celsius && role == SeriesRole::Temperature) value += kKelvinOffset;
        if (!t.empty() && !(time > t.back()))
            throw ParseError(path.string(), r + 1, "time_s must be strictly increasing");
        t.push_back(time);
        v.push_back(value);
    }
    if (t.size() < 2) throw ParseError(path.string(), rows.size(), "series needs at least 2 rows");
    return TimeSeries(std::move(t), std::move(v));
}

void write_series(const std::filesystem::path& path, const TimeSeries& series) {
    auto out = open_for_write(path);
    out << "time_s,value\n";
    for (std::size_t i = 0; i < series.size(); ++i)
        out << format_double(series.times()[i]) << ',' << format_double(series.values()[i]) << '\n';
}

double interpolate(const TimeSeries& series, double t) { return series.at(t); }

MeasurementSet load_measurements(const std::filesystem::path& path, double noise_std, IngestUnits units) {
    const auto rows = read_table(path, {"time_s", "depth_m", "temperature_K"});
    if (rows.empty()) throw ParseError(path.string(), 0, "no measurements");
    std::map<double, std::size_t> time_index;
    std::map<double, std::size_t> depth_index;
    for (const auto& r : rows) {
        time_index.emplace(units.hours ? r[0] * 3600.0 : r[0], 0);
        depth_index.emplace(r[1], 0);
    }
    std::vector<double> times;
    std::vector<double> depths;
    for (auto& [t, i] : time_index) { i = times.size(); times.push_back(t); }
    for (auto& [d, i] : depth_index) { i = depths.size(); depths.push_back(d); }

    Eigen::MatrixXd Y(depths.size(), times.size());
    Eigen::MatrixXi seen = Eigen::MatrixXi::Zero(static_cast<long>(depths.size()), static_cast<long>(times.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const double t = units.hours ? rows[r][0] * 3600.0 : rows[r][0];
        const auto i = static_cast<long>(depth_index.at(rows[r][1]));
        const auto n = static_cast<long>(time_index.at(t));
        if (seen(i, n)) throw ParseError(path.string(), r + 1, "duplicate (time_s, depth_m) pair");
        seen(i, n) = 1;
        Y(i, n) = rows[r][2] + (units.celsius ? kKelvinOffset : 0.0);
    }
    if (seen.minCoeff() == 0) throw ParseError(path.string(), rows.size(), "measurement grid is incomplete");
    return MeasurementSet(std::move(depths), std::move(times), std::move(Y), noise_std);
}

void write_measurements(const std::filesystem::path& path, const MeasurementSet& data) {
    auto out = open_for_write(path);
    out << "time_s,depth_m,temperature_K\n";
    for (std::size_t n = 0; n < data.observations(); ++n)
        for (std::size_t i = 0; i < data.sensors(); ++i)
            out << format_double(data.times()[n]) << ',' << format_double(data.depths()[i]) << ','
                << format_double(data.temperatures()(static_cast<long>(i), static_cast<long>(n))) << '\n';
}

DepthProfile load_profile(const std::filesystem::path& path, IngestUnits units) {
    const auto rows = read_table(path, {"depth_m", "temperature_K"});
    std::vector<double> d;
    std::vector<double> v;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (!d.empty() && !(rows[r][0] > d.back()))
            throw ParseError(path.string(), r + 1, "depth_m must be strictly increasing");
        d.push_back(rows[r][0]);
        v.push_back(rows[r][1] + (units.celsius ? kKelvinOffset : 0.0));
    }
    if (d.empty()) throw ParseError(path.string(), 0, "profile needs at least one row");
    return DepthProfile(std::move(d), std::move(v));
}

void write_profile(const std::filesystem::path& path, const DepthProfile& profile) {
    auto out = open_for_write(path);
    out << "depth_m,temperature_K\n";
    for (std::size_t i = 0; i < profile.depths().size(); ++i)
        out << format_double(profile.depths()[i]) << ',' << format_double(profile.values()[i]) << '\n';
}

DepthProfile initial_profile_from_sensors(const std::vector<double>& depths,
                                          const std::vector<double>& temperatures, double depth) {
    if (depths.size() < 2 || depths.size() != temperatures.size())
        throw DomainError("initial profile needs at least 2 sensors with matching temperatures");
    std::vector<std::size_t> order(depths.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return depths[a] < depths[b]; });
    std::vector<double> d;
    std::vector<double> v;
    for (auto i : order) {
        if (depths[i] < 0 || depths[i] > depth) throw DomainError("sensor depth outside [0, L]");
        d.push_back(depths[i]);
        v.push_back(temperatures[i]);
    }
    return DepthProfile(std::move(d), std::move(v));
}

TimeSeries moving_average(const TimeSeries& series, double window) {
    if (!(window > 0)) throw DomainError("moving-average window must be positive");
    const auto& t = series.times();
    const auto& v = series.values();
    const std::size_t n = t.size();
    std::vector<double> out(n);
    const double tol = 1e-12 * std::max(std::abs(t.front()), std::abs(t.back()));
    for (std::size_t i = 0; i < n; ++i) {
        const double half = std::min({0.5 * window, t[i] - t.front(), t.back() - t[i]});
        const auto lo = std::lower_bound(t.begin(), t.end(), t[i] - half - tol) - t.begin();
        const auto hi = std::upper_bound(t.begin(), t.end(), t[i] + half + tol) - t.begin();
        double s = 0;
        for (auto k = lo; k < hi; ++k) s += v[static_cast<std::size_t>(k)];
        out[i] = s / static_cast<double>(hi - lo);
    }
    return TimeSeries(t, std::move(out));
}

double empirical_h_from_wind(double velocity) {
    if (!(velocity >= 0) || !std::isfinite(velocity)) throw DomainError("wind velocity must be non-negative");
    return 4.0 + 4.0 * velocity;
}

std::vector<double> observation_times(double final_time, double cadence) {
    if (!(cadence > 0)) throw DomainError("observation cadence must be positive");
    const auto count = static_cast<std::size_t>(std::floor(final_time / cadence * (1.0 + 1e-12)));
    std::vector<double> t(count + 1);
    for (std::size_t i = 0; i <= count; ++i) t[i] = static_cast<double>(i) * cadence;
    if (t.back() > final_time) t.back() = final_time;
    return t;
}

MeasurementSet generate_twin_data(const TwinSpec& spec, const PhysicalProblem& problem,
                                  const ReferenceScales& refs, const SolverSettings& settings) {
    if (!(spec.noise_std >= 0)) throw DomainError("twin noise std must be non-negative");
    const std::vector<double> times = observation_times(problem.final_time(), spec.cadence);
    const PhysicalProblem truth = problem.with_material(spec.material);
    const DimensionlessProblem dimless = nondimensionalize(truth, refs, spec.h);
    Eigen::MatrixXd Y = solve_at_sensors(dimless, settings, spec.depths, times);
    if (spec.noise_std > 0) {
        Rng rng(spec.seed);
        std::normal_distribution<double> noise(0.0, spec.noise_std);
        for (long i = 0; i < Y.rows(); ++i)
            for (long n = 0; n < Y.cols(); ++n) Y(i, n) += noise(rng);
    }
    const double sigma = spec.noise_std > 0 ? spec.noise_std : spec.assumed_noise_std;
    return MeasurementSet(spec.depths, times, std::move(Y), sigma);
}

Forcing synthetic_forcing(double final_time, double depth, double cadence) {
    const std::vector<double> t = observation_times(final_time, cadence);
    std::vector<double> t_all = t;
    if (t_all.back() < final_time) t_all.push_back(final_time);
    std::vector<double> air;
    std::vector<double> flux;
    std::vector<double> deep;
    const double two_pi = 2.0 * std::numbers::pi;
    for (double s : t_all) {
        const double hour = s / 3600.0;
        const double day_hour = std::fmod(hour, 24.0);
        air.push_back(291.15 + 6.0 * std::sin(two_pi * (hour - 9.0) / 24.0));
        const double sun = (day_hour > 6.0 && day_hour < 20.0) ? std::sin(std::numbers::pi * (day_hour - 6.0) / 14.0) : 0.0;
        flux.push_back(550.0 * sun - 70.0);
        deep.push_back(296.15 + 1.5 * std::sin(two_pi * (hour - 12.0) / 24.0));
    }
    const double surface0 = air.front() + 1.0;
    return Forcing{TimeSeries(t_all, std::move(air)), TimeSeries(t_all, std::move(flux)),
                   TimeSeries(t_all, deep), DepthProfile({0.0, depth}, {surface0, deep.front()})};
}

void write_chain(const std::filesystem::path& path, const Chain& chain) {
    auto out = open_for_write(path);
    out << "index";
    for (std::size_t j = 0; j < chain.dimension(); ++j)
        out << ',' << (j < chain.names.size() ? chain.names[j] : "p" + std::to_string(j));
    out << ",log_posterior,accepted\n";
    for (std::size_t k = 0; k < chain.states(); ++k) {
        out << k;
        for (std::size_t j = 0; j < chain.dimension(); ++j)
            out << ',' << format_double(chain.samples(static_cast<long>(k), static_cast<long>(j)));
        out << ',' << format_double(chain.log_posterior[k]) << ',' << static_cast<int>(chain.accepted[k]) << '\n';
    }
}

Chain load_chain(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string(), 0, "empty file");
    auto header = split(line);
    for (auto& h : header) h = trim(h);
    if (header.size() < 4 || header.front() != "index" || header[header.size() - 2] != "log_posterior" ||
        header.back() != "accepted")
        throw ParseError(path.string(), 0, "expected index,<parameters>,log_posterior,accepted");

    Chain chain;
    chain.names.assign(header.begin() + 1, header.end() - 2);
    const std::size_t dim = chain.names.size();
    std::vector<double> flat;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto f = split(line);
        if (f.size() != header.size()) throw ParseError(path.string(), row, "wrong number of fields");
        for (std::size_t j = 0; j < dim + 1; ++j) {
            const std::string t = trim(f[j + 1]);
            double v = 0;
            if (t == "-inf") v = -std::numeric_limits<double>::infinity();
            else {
                const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
                if (ec != std::errc() || ptr != t.data() + t.size())
                    throw ParseError(path.string(), row, "not a number: '" + t + "'");
            }
            if (j < dim) flat.push_back(v);
            else chain.log_posterior.push_back(v);
        }
        const std::string acc = trim(f.back());
        if (acc != "0" && acc != "1") throw ParseError(path.string(), row, "accepted must be 0 or 1");
        chain.accepted.push_back(acc == "1" ? 1 : 0);
    }
    const auto states = static_cast<long>(chain.accepted.size());
    chain.samples.resize(states, static_cast<long>(dim));
    for (long k = 0; k < states; ++k)
        for (long j = 0; j < static_cast<long>(dim); ++j)
            chain.samples(k, j) = flat[static_cast<std::size_t>(k) * dim + static_cast<std::size_t>(j)];
    return chain;
}

}  // namespace groundheat::io
