#include "groundheat/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numeric>

#include <fftw3.h>

#include "groundheat/forward.hpp"

namespace groundheat {

namespace {

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double quantile_sorted(const std::vector<double>& s, double q) {
    const double pos = q * static_cast<double>(s.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

// FFTW planning is not thread-safe.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// Biased autocovariance of the centred series for all lags via zero-padded FFT.
std::vector<double> fft_autocovariance(const std::vector<double>& centred) {
    const std::size_t n = centred.size();
    std::size_t size = 1;
    while (size < 2 * n) size <<= 1;
    const std::size_t half = size / 2 + 1;

    double* in = fftw_alloc_real(size);
    fftw_complex* spec = fftw_alloc_complex(half);
    fftw_plan fwd;
    fftw_plan inv;
    {
        std::lock_guard lock(fftw_planner_mutex());
        fwd = fftw_plan_dft_r2c_1d(static_cast<int>(size), in, spec, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(static_cast<int>(size), spec, in, FFTW_ESTIMATE);
    }

    std::copy(centred.begin(), centred.end(), in);
    std::fill(in + n, in + size, 0.0);
    fftw_execute(fwd);
    for (std::size_t k = 0; k < half; ++k) {
        spec[k][0] = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
        spec[k][1] = 0.0;
    }
    fftw_execute(inv);
    std::vector<double> acov(n);
    const double norm = static_cast<double>(size) * static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) acov[k] = in[k] / norm;

    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
    }
    fftw_free(in);
    fftw_free(spec);
    return acov;
}

}  // namespace

PosteriorSummary summarize(const Chain& chain, std::size_t burn_in) {
    if (burn_in >= chain.states()) throw DomainError("burn-in must be shorter than the chain");
    PosteriorSummary s;
    s.names = chain.names;
    s.burn_in = burn_in;
    s.acceptance_rate = acceptance_rate(chain);
    const std::size_t n = chain.states() - burn_in;
    for (std::size_t j = 0; j < chain.dimension(); ++j) {
        const std::vector<double> col = chain.column(j, burn_in);
        const double m = mean_of(col);
        double ss = 0;
        for (double v : col) ss += (v - m) * (v - m);
        s.mean.push_back(m);
        s.std.push_back(n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0);
    }
    return s;
}

double acceptance_rate(const Chain& chain) {
    if (chain.states() == 0) throw DomainError("acceptance rate of an empty chain");
    if (chain.accepted.size() != chain.states()) throw DomainError("chain acceptance flags do not match its states");
    if (chain.states() == 1) return 0.0;
    const auto accepted = std::count(chain.accepted.begin() + 1, chain.accepted.end(), std::uint8_t{1});
    return static_cast<double>(accepted) / static_cast<double>(chain.states() - 1);
}

std::vector<double> geweke_relative_difference(const Chain& chain, std::size_t burn_in, double first_frac,
                                               double last_frac) {
    if (!(first_frac > 0 && first_frac < 1 && last_frac > 0 && last_frac < 1) || first_frac + last_frac > 1)
        throw DomainError("Geweke fractions must lie in (0, 1) and not overlap");
    if (burn_in >= chain.states()) throw DomainError("burn-in must be shorter than the chain");
    const std::size_t n = chain.states() - burn_in;
    const auto n_first = static_cast<std::size_t>(std::floor(first_frac * static_cast<double>(n)));
    const auto n_last = static_cast<std::size_t>(std::floor(last_frac * static_cast<double>(n)));
    if (n_first == 0 || n_last == 0) throw DomainError("Geweke segments are empty");

    std::vector<double> out;
    for (std::size_t j = 0; j < chain.dimension(); ++j) {
        const std::vector<double> col = chain.column(j, burn_in);
        const double a = mean_of(std::span(col).first(n_first));
        const double b = mean_of(std::span(col).last(n_last));
        if (a == b) out.push_back(0.0);
        else out.push_back(std::abs(a - b) / std::abs(b));
    }
    return out;
}

Autocorrelation autocovariance_and_iact(std::span<const double> series, std::size_t max_lag,
                                        double window_factor) {
    const std::size_t n = series.size();
    if (n < 100) throw DomainError("autocorrelation needs at least 100 states");
    const double m = mean_of(series);
    std::vector<double> centred(n);
    std::transform(series.begin(), series.end(), centred.begin(), [m](double x) { return x - m; });

    double var = 0;
    for (double c : centred) var += c * c;
    var /= static_cast<double>(n);
    if (!(var > 0)) throw DegenerateInput("zero-variance chain has no autocorrelation time");

    std::vector<double> acov = fft_autocovariance(centred);
    acov[0] = var;

    Autocorrelation out;
    double tau = 1.0;
    std::size_t w = 1;
    for (; w < n; ++w) {
        tau += 2.0 * acov[w] / var;
        if (static_cast<double>(w) >= window_factor * tau) break;
    }
    out.window = std::min(w, n - 1);
    out.iact = tau;

    std::size_t keep = max_lag != 0 ? max_lag : std::max<std::size_t>(out.window, 1000);
    keep = std::min(keep, n - 1);
    out.autocovariance.assign(acov.begin(), acov.begin() + static_cast<long>(keep) + 1);
    return out;
}

Autocorrelation autocovariance_and_iact(const Chain& chain, std::size_t parameter, std::size_t burn_in,
                                        std::size_t max_lag) {
    if (parameter >= chain.dimension()) throw DomainError("parameter index out of range");
    const std::vector<double> col = chain.column(parameter, burn_in);
    return autocovariance_and_iact(col, max_lag);
}

std::vector<double> autocovariance_norm(const std::vector<Autocorrelation>& per_parameter) {
    std::size_t lags = std::numeric_limits<std::size_t>::max();
    for (const auto& a : per_parameter) lags = std::min(lags, a.autocovariance.size());
    if (per_parameter.empty()) lags = 0;
    std::vector<double> norm(lags, 0.0);
    for (std::size_t k = 0; k < lags; ++k) {
        double s = 0;
        for (const auto& a : per_parameter) s += a.autocovariance[k] * a.autocovariance[k];
        norm[k] = std::sqrt(s);
    }
    return norm;
}

std::size_t freedman_diaconis_bins(std::span<const double> values) {
    constexpr std::size_t floor_bins = 10;
    constexpr std::size_t cap_bins = 1000;
    if (values.size() < 2) return floor_bins;
    std::vector<double> s(values.begin(), values.end());
    std::sort(s.begin(), s.end());
    const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
    const double range = s.back() - s.front();
    if (!(iqr > 0) || !(range > 0)) return floor_bins;
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(s.size()));
    const auto bins = static_cast<std::size_t>(std::ceil(range / width));
    return std::clamp(bins, floor_bins, cap_bins);
}

Histogram histogram(std::span<const double> values, std::size_t bins) {
    if (bins < 1) throw DomainError("histogram needs at least one bin");
    if (values.empty()) throw DomainError("histogram of an empty sample");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it;
    double hi = *hi_it;
    if (lo == hi) {
        const double pad = std::max(std::abs(lo) * 1e-9, 1e-12);
        lo -= pad;
        hi += pad;
    }
    Histogram h;
    h.edges = uniform_grid(hi - lo, bins);
    for (double& e : h.edges) e += lo;
    h.edges.back() = hi;
    h.counts.assign(bins, 0);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (double v : values) {
        auto b = static_cast<std::size_t>(std::floor((v - lo) / width));
        b = std::min(b, bins - 1);
        // Keep the edge convention [e_b, e_{b+1}) exact despite rounding in the division.
        while (b > 0 && v < h.edges[b]) --b;
        while (b + 1 < bins && v >= h.edges[b + 1]) ++b;
        ++h.counts[b];
    }
    return h;
}

Histogram histogram(const Chain& chain, std::size_t parameter, std::size_t burn_in,
                    std::optional<std::size_t> bins) {
    if (parameter >= chain.dimension()) throw DomainError("parameter index out of range");
    if (burn_in >= chain.states()) throw DomainError("burn-in must be shorter than the chain");
    const std::vector<double> col = chain.column(parameter, burn_in);
    return histogram(col, bins.value_or(freedman_diaconis_bins(col)));
}

ResidualReport residual_report(const Eigen::MatrixXd& measured, const Eigen::MatrixXd& predicted,
                               double noise_std) {
    if (measured.rows() != predicted.rows() || measured.cols() != predicted.cols())
        throw DomainError("residuals: measurement and prediction shapes differ");
    ResidualReport r;
    r.residuals = measured - predicted;
    const auto M = static_cast<std::size_t>(measured.rows());
    const auto n = static_cast<std::size_t>(measured.cols());
    std::size_t inside_total = 0;
    for (std::size_t i = 0; i < M; ++i) {
        double max_abs = 0;
        double max_rel = 0;
        std::size_t inside = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const double a = std::abs(r.residuals(static_cast<long>(i), static_cast<long>(k)));
            max_abs = std::max(max_abs, a);
            const double y = std::abs(measured(static_cast<long>(i), static_cast<long>(k)));
            if (y > 0) max_rel = std::max(max_rel, 100.0 * a / y);
            if (a <= noise_std) ++inside;
        }
        r.max_abs.push_back(max_abs);
        r.max_relative_pct.push_back(max_rel);
        r.within_sigma.push_back(n ? static_cast<double>(inside) / static_cast<double>(n) : 1.0);
        inside_total += inside;
    }
    r.within_sigma_total = M * n > 0 ? static_cast<double>(inside_total) / static_cast<double>(M * n) : 1.0;
    return r;
}

}  // namespace groundheat
