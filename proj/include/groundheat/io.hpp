#pragma once

// File formats (UTF-8, '.' decimal separator, LF line endings, SI units):
//   series        time_s,value
//   measurements  time_s,depth_m,temperature_K   (one row per time and depth)
//   profile       depth_m,temperature_K
//   chain         index,<parameter names...>,log_posterior,accepted

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "groundheat/domain.hpp"
#include "groundheat/forward.hpp"
#include "groundheat/inference.hpp"

namespace groundheat::io {

/// What a series carries; decides which ingest conversions apply.
enum class SeriesRole { Temperature, Flux, Velocity };

/// Conversions applied while reading human-prepared files.
struct IngestUnits {
    bool hours = false;    ///< time column in hours
    bool celsius = false;  ///< temperature columns in °C
};

TimeSeries load_series(const std::filesystem::path& path, SeriesRole role = SeriesRole::Temperature,
                       IngestUnits units = {});
void write_series(const std::filesystem::path& path, const TimeSeries& series);

double interpolate(const TimeSeries& series, double t);

MeasurementSet load_measurements(const std::filesystem::path& path, double noise_std, IngestUnits units = {});
void write_measurements(const std::filesystem::path& path, const MeasurementSet& data);

DepthProfile load_profile(const std::filesystem::path& path, IngestUnits units = {});
void write_profile(const std::filesystem::path& path, const DepthProfile& profile);

/// Piecewise-linear through the sensors, constant beyond the outermost ones.
DepthProfile initial_profile_from_sensors(const std::vector<double>& depths,
                                          const std::vector<double>& temperatures, double depth);

/// Centred moving average over a time window; the window shrinks symmetrically near the ends.
TimeSeries moving_average(const TimeSeries& series, double window);

/// Forced-convection correlation h(v) = 4 + 4·v [W/(m²·K)].
double empirical_h_from_wind(double velocity);

struct TwinSpec {
    MaterialParams material;
    SurfaceCoefficient h;
    std::vector<double> depths;
    double cadence;                 ///< observation spacing [s]
    double noise_std;               ///< K; 0 gives noiseless data
    std::uint64_t seed;
    double assumed_noise_std = 0.25;  ///< σ stored with noiseless data
};

/// Observation times 0, cadence, 2·cadence, ... ≤ t_f.
std::vector<double> observation_times(double final_time, double cadence);

/// Forward solve with the true parameters plus i.i.d. N(0, σ²) noise per sensor and time.
MeasurementSet generate_twin_data(const TwinSpec& spec, const PhysicalProblem& problem,
                                  const ReferenceScales& refs, const SolverSettings& settings);

/// Smooth diurnal forcing used when no boundary files are given.
struct Forcing {
    TimeSeries air_temperature;
    TimeSeries net_radiation;
    TimeSeries deep_temperature;
    DepthProfile initial_profile;
};
Forcing synthetic_forcing(double final_time, double depth, double cadence = 900.0);

void write_chain(const std::filesystem::path& path, const Chain& chain);
Chain load_chain(const std::filesystem::path& path);

/// Shortest decimal text (up to 17 significant digits) that round-trips the value.
std::string format_double(double v);

}  // namespace groundheat::io
