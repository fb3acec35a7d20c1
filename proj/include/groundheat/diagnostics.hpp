#pragma once

// Post-processing of MH chains and temperature residuals.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "groundheat/inference.hpp"

namespace groundheat {

struct PosteriorSummary {
    std::vector<std::string> names;
    std::vector<double> mean;
    std::vector<double> std;  ///< sample std (n − 1 denominator; 0 for a single state)
    double acceptance_rate = 0;
    std::size_t burn_in = 0;
};

/// Statistics over rows [burn_in, N_s).
PosteriorSummary summarize(const Chain& chain, std::size_t burn_in);

/// accepted / (N_s − 1); 0 for a single-state chain.
double acceptance_rate(const Chain& chain);

/// |mean(first) − mean(last)| / |mean(last)| per parameter, where the segments are the
/// first `first_frac` and last `last_frac` of the post-burn-in states.
std::vector<double> geweke_relative_difference(const Chain& chain, std::size_t burn_in = 0,
                                               double first_frac = 0.10, double last_frac = 0.50);

struct Autocorrelation {
    std::vector<double> autocovariance;  ///< lags 0..max_lag, biased (1/n) normalization
    double iact = 0;                     ///< 1 + 2·Σ_{k≤W} ρ_k
    std::size_t window = 0;              ///< W
};

/// Autocovariance by FFT and IACT with the automatic window: smallest W ≥ c·τ(W).
/// `max_lag` limits the returned sequence (0 = up to the window, at least 1000 lags when available).
Autocorrelation autocovariance_and_iact(std::span<const double> series, std::size_t max_lag = 0,
                                        double window_factor = 5.0);

Autocorrelation autocovariance_and_iact(const Chain& chain, std::size_t parameter, std::size_t burn_in = 0,
                                        std::size_t max_lag = 0);

/// Euclidean norm across parameters of the autocovariance at each lag.
std::vector<double> autocovariance_norm(const std::vector<Autocorrelation>& per_parameter);

struct Histogram {
    std::vector<double> edges;  ///< bins + 1
    std::vector<std::size_t> counts;
};

/// Bin count by the Freedman–Diaconis rule, floored at 10.
std::size_t freedman_diaconis_bins(std::span<const double> values);

Histogram histogram(std::span<const double> values, std::size_t bins);
Histogram histogram(const Chain& chain, std::size_t parameter, std::size_t burn_in = 0,
                    std::optional<std::size_t> bins = std::nullopt);

struct ResidualReport {
    Eigen::MatrixXd residuals;               ///< M × n_obs, Y − T [K]
    std::vector<double> max_abs;             ///< per sensor [K]
    std::vector<double> max_relative_pct;    ///< per sensor, % of |Y|
    std::vector<double> within_sigma;        ///< per sensor fraction with |r| ≤ σ
    double within_sigma_total = 0;
};

ResidualReport residual_report(const Eigen::MatrixXd& measured, const Eigen::MatrixXd& predicted,
                               double noise_std);

}  // namespace groundheat
