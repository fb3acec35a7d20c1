#include "groundheat/domain.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace groundheat {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw DomainError(what);
}

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

bool strictly_increasing(const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

// Relative slack for comparing breakpoints and coverage against t_f.
constexpr double kTimeSlack = 1e-9;

}  // namespace

MaterialParams::MaterialParams(double conductivity, double heat_capacity)
    : conductivity_(conductivity), heat_capacity_(heat_capacity) {
    require(conductivity > 0 && std::isfinite(conductivity), "conductivity must be positive");
    require(heat_capacity > 0 && std::isfinite(heat_capacity), "heat capacity must be positive");
}

TimeSeries::TimeSeries(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
    require(times_.size() == values_.size(), "time series: times and values differ in length");
    require(times_.size() >= 2, "time series needs at least 2 samples");
    require(all_finite(times_) && all_finite(values_), "time series has non-finite entries");
    require(strictly_increasing(times_), "time series times must be strictly increasing");
}

bool TimeSeries::covers(double t0, double t1) const noexcept {
    const double slack = kTimeSlack * std::max({std::abs(t0), std::abs(t1), 1.0});
    return start() <= t0 + slack && end() >= t1 - slack;
}

double TimeSeries::at(double t) const {
    const double slack = kTimeSlack * std::max({std::abs(start()), std::abs(end()), 1.0});
    if (!(t >= start() - slack && t <= end() + slack))
        throw DomainError("time series queried outside its span");
    if (t <= start()) return values_.front();
    if (t >= end()) return values_.back();
    const auto hi = std::upper_bound(times_.begin(), times_.end(), t);
    const auto k = static_cast<std::size_t>(hi - times_.begin());
    const double t0 = times_[k - 1];
    const double t1 = times_[k];
    if (t == t0) return values_[k - 1];
    const double w = (t - t0) / (t1 - t0);
    return values_[k - 1] + w * (values_[k] - values_[k - 1]);
}

TimeSeries TimeSeries::scaled(double time_factor, double value_factor) const {
    std::vector<double> t(times_.size());
    std::vector<double> v(values_.size());
    std::transform(times_.begin(), times_.end(), t.begin(), [&](double x) { return x * time_factor; });
    std::transform(values_.begin(), values_.end(), v.begin(), [&](double x) { return x * value_factor; });
    return TimeSeries(std::move(t), std::move(v));
}

DepthProfile::DepthProfile(std::vector<double> depths, std::vector<double> values)
    : depths_(std::move(depths)), values_(std::move(values)) {
    require(!depths_.empty() && depths_.size() == values_.size(),
            "depth profile needs matching, non-empty depths and values");
    require(all_finite(depths_) && all_finite(values_), "depth profile has non-finite entries");
    require(strictly_increasing(depths_), "depth profile depths must be strictly increasing");
}

DepthProfile DepthProfile::uniform(double value) { return DepthProfile({0.0}, {value}); }

double DepthProfile::at(double x) const noexcept {
    if (x <= depths_.front()) return values_.front();
    if (x >= depths_.back()) return values_.back();
    const auto hi = std::upper_bound(depths_.begin(), depths_.end(), x);
    const auto k = static_cast<std::size_t>(hi - depths_.begin());
    const double w = (x - depths_[k - 1]) / (depths_[k] - depths_[k - 1]);
    return values_[k - 1] + w * (values_[k] - values_[k - 1]);
}

DepthProfile DepthProfile::scaled(double depth_factor, double value_factor) const {
    std::vector<double> d(depths_.size());
    std::vector<double> v(values_.size());
    std::transform(depths_.begin(), depths_.end(), d.begin(), [&](double x) { return x * depth_factor; });
    std::transform(values_.begin(), values_.end(), v.begin(), [&](double x) { return x * value_factor; });
    return DepthProfile(std::move(d), std::move(v));
}

PhysicalProblem::PhysicalProblem(PhysicalProblemData data) : d_(std::move(data)) {
    require(d_.depth > 0 && std::isfinite(d_.depth), "slab depth must be positive");
    require(d_.final_time > 0 && std::isfinite(d_.final_time), "final time must be positive");
    require(d_.air_temperature.covers(0.0, d_.final_time), "air temperature does not cover [0, t_f]");
    require(d_.net_radiation.covers(0.0, d_.final_time), "net radiation does not cover [0, t_f]");
    require(d_.deep_temperature.covers(0.0, d_.final_time), "deep temperature does not cover [0, t_f]");
}

PhysicalProblem PhysicalProblem::with_material(const MaterialParams& material) const {
    PhysicalProblemData d = d_;
    d.material = material;
    return PhysicalProblem(std::move(d));
}

PhysicalProblem PhysicalProblem::with_net_radiation(TimeSeries net_radiation) const {
    PhysicalProblemData d = d_;
    d.net_radiation = std::move(net_radiation);
    return PhysicalProblem(std::move(d));
}

ReferenceScales::ReferenceScales(double time, double temperature, double conductivity,
                                 double heat_capacity, double heat_transfer)
    : time_(time), temperature_(temperature), conductivity_(conductivity),
      heat_capacity_(heat_capacity), heat_transfer_(heat_transfer) {
    for (double v : {time, temperature, conductivity, heat_capacity, heat_transfer})
        require(v > 0 && std::isfinite(v), "reference scales must be strictly positive");
}

double ReferenceScales::fourier(double depth) const noexcept {
    return conductivity_ * time_ / (heat_capacity_ * depth * depth);
}

double ReferenceScales::biot(double depth) const noexcept {
    return heat_transfer_ * depth / conductivity_;
}

std::vector<double> build_uniform_partition(double final_time, std::size_t intervals) {
    require(intervals >= 1, "partition needs at least one interval");
    require(final_time > 0 && std::isfinite(final_time), "partition final time must be positive");
    std::vector<double> b(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i)
        b[i] = final_time * static_cast<double>(i) / static_cast<double>(intervals);
    b.back() = final_time;
    return b;
}

SurfaceCoefficient::SurfaceCoefficient(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    require(!values_.empty(), "surface coefficient needs at least one interval");
    require(breakpoints_.size() == values_.size() + 1,
            "surface coefficient needs N_t + 1 breakpoints for N_t values");
    require(breakpoints_.front() == 0.0, "first breakpoint must be 0");
    require(all_finite(breakpoints_) && strictly_increasing(breakpoints_),
            "breakpoints must be finite and strictly increasing");
    require(std::all_of(values_.begin(), values_.end(),
                        [](double h) { return h > 0 && std::isfinite(h); }),
            "surface coefficient values must be positive");
}

std::size_t SurfaceCoefficient::interval_index(double t) const {
    const double tf = breakpoints_.back();
    if (!(t >= 0.0 && t <= tf)) throw DomainError("surface coefficient queried outside [0, t_f]");
    if (t == tf) return values_.size() - 1;
    const auto hi = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    return static_cast<std::size_t>(hi - breakpoints_.begin()) - 1;
}

SurfaceCoefficient SurfaceCoefficient::scaled(double time_factor, double value_factor) const {
    std::vector<double> b(breakpoints_.size());
    std::vector<double> v(values_.size());
    std::transform(breakpoints_.begin(), breakpoints_.end(), b.begin(),
                   [&](double x) { return x * time_factor; });
    std::transform(values_.begin(), values_.end(), v.begin(), [&](double x) { return x * value_factor; });
    return SurfaceCoefficient(std::move(b), std::move(v));
}

double evaluate_surface_coefficient(const SurfaceCoefficient& coeff, double t) {
    return coeff.values()[coeff.interval_index(t)];
}

MeasurementSet::MeasurementSet(std::vector<double> depths, std::vector<double> times,
                               Eigen::MatrixXd temperatures, double noise_std)
    : depths_(std::move(depths)), times_(std::move(times)), temperatures_(std::move(temperatures)),
      noise_std_(noise_std) {
    require(!depths_.empty() && !times_.empty(), "measurement set must be non-empty");
    require(static_cast<std::size_t>(temperatures_.rows()) == depths_.size() &&
                static_cast<std::size_t>(temperatures_.cols()) == times_.size(),
            "measurement matrix must be sensors x observation times");
    require(all_finite(depths_) && all_finite(times_), "measurement coordinates must be finite");
    require(temperatures_.allFinite(), "measured temperatures must be finite");
    require(std::all_of(depths_.begin(), depths_.end(), [](double x) { return x >= 0; }),
            "sensor depths must be non-negative");
    std::vector<double> sorted = depths_;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
            "sensor depths must be distinct");
    require(strictly_increasing(times_) && times_.front() >= 0,
            "observation times must be non-negative and strictly increasing");
    require(noise_std_ > 0 && std::isfinite(noise_std_), "measurement noise std must be positive");
}

MeasurementSet MeasurementSet::with_temperatures(Eigen::MatrixXd temperatures) const {
    return MeasurementSet(depths_, times_, std::move(temperatures), noise_std_);
}

void MeasurementSet::check_within(double depth, double final_time) const {
    const double tslack = kTimeSlack * final_time;
    const double xslack = kTimeSlack * depth;
    for (double x : depths_)
        if (x > depth + xslack) throw DomainError("sensor depth beyond the slab depth");
    for (double t : times_)
        if (t > final_time + tslack) throw DomainError("observation time beyond t_f");
}

ParameterLayout::ParameterLayout(std::size_t intervals, bool has_gamma)
    : intervals_(intervals), has_gamma_(has_gamma) {
    require(intervals >= 1, "parameter layout needs at least one h interval");
}

std::size_t ParameterLayout::gamma_index() const {
    if (!has_gamma_) throw DomainError("layout has no hyperparameter");
    return 2 + intervals_;
}

std::vector<std::string> ParameterLayout::names() const {
    std::vector<std::string> n{"kappa", "C"};
    for (std::size_t i = 0; i < intervals_; ++i) n.push_back("h" + std::to_string(i + 1));
    if (has_gamma_) n.emplace_back("gamma");
    return n;
}

ParameterVector::ParameterVector(ParameterLayout layout, std::vector<double> values)
    : layout_(layout), values_(std::move(values)) {
    require(values_.size() == layout_.size(), "parameter vector length does not match its layout");
    require(std::all_of(values_.begin(), values_.end(), [](double v) { return v > 0 && std::isfinite(v); }),
            "parameter components must be positive");
}

ParameterVector ParameterVector::pack(double conductivity, double heat_capacity,
                                      std::span<const double> h, std::optional<double> gamma) {
    std::vector<double> v;
    v.reserve(3 + h.size());
    v.push_back(conductivity);
    v.push_back(heat_capacity);
    v.insert(v.end(), h.begin(), h.end());
    if (gamma) v.push_back(*gamma);
    return ParameterVector(ParameterLayout(h.size(), gamma.has_value()), std::move(v));
}

UnpackedParameters ParameterVector::unpack() const {
    UnpackedParameters u{values_[0], values_[1],
                         std::vector<double>(values_.begin() + 2,
                                             values_.begin() + 2 + static_cast<long>(layout_.intervals())),
                         std::nullopt};
    if (layout_.has_gamma()) u.gamma = values_[layout_.gamma_index()];
    return u;
}

}  // namespace groundheat
