#pragma once

// Bayesian estimation of (κ, C, h_1..h_Nt[, γ]) by random-walk Metropolis–Hastings.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "groundheat/domain.hpp"
#include "groundheat/forward.hpp"

namespace groundheat {

/// Independent Gaussian prior, optionally restricted to positive components.
struct GaussianPrior {
    std::vector<double> mean;
    std::vector<double> std;
    bool positive = true;

    void validate() const;
};

/// First-order-difference smoothness prior on the h vector with scale γ.
struct SmoothnessPrior {
    std::size_t size;  ///< N_t
    double gamma0;     ///< Rayleigh scale [m⁴·K²·W⁻²]

    void validate() const;
};

/// Gaussian log-density of Y given predictions with W = σ²·I.
double log_likelihood(const Eigen::MatrixXd& measured, const Eigen::MatrixXd& predicted, double noise_std);

/// Sum of independent Gaussian log-densities; −∞ if a constrained component is ≤ 0.
/// The truncation normalizer is omitted (it does not depend on the parameters).
double log_gaussian_prior(std::span<const double> values, const GaussianPrior& prior);

/// ‖D·h‖² with D the (N_t−1)×N_t first-order difference matrix.
double squared_difference_norm(std::span<const double> h);

/// (N_t/2)·ln γ − (γ/2)·‖D·h‖²; −∞ for γ ≤ 0.
double log_smoothness_prior(std::span<const double> h, double gamma, const SmoothnessPrior& prior);

/// ln γ − 2 ln γ₀ − (γ/γ₀)²/2; −∞ for γ ≤ 0.
double log_rayleigh(double gamma, double gamma0);

/// min(1, exp(candidate − current)); 0 when the candidate is −∞.
double acceptance_probability(double log_post_candidate, double log_post_current);

enum class PriorMode {
    /// Truncated Gaussian priors on every physical parameter.
    CaseAB,
    /// Gaussian priors on (κ, C); smoothness prior on h with a Rayleigh hyperprior on γ.
    CaseC,
};

std::string to_string(PriorMode mode);
PriorMode parse_prior_mode(const std::string& text);

struct PosteriorTerms {
    double likelihood = 0;
    double gaussian = 0;
    double smoothness = 0;
    double hyperprior = 0;
    double total = 0;
};

/// Everything needed to evaluate π(P|Y) ∝ π(P)·π(Y|P).
class PosteriorModel {
public:
    struct Options {
        bool use_likelihood = true;
        bool use_hyperprior = true;
    };

    /// `gaussian` covers all physical parameters in CaseAB and (κ, C) in CaseC.
    PosteriorModel(PhysicalProblem problem, ReferenceScales refs, SolverSettings settings,
                   MeasurementSet data, std::vector<double> breakpoints, PriorMode mode,
                   GaussianPrior gaussian, std::optional<SmoothnessPrior> smoothness, Options options);

    PosteriorModel(PhysicalProblem problem, ReferenceScales refs, SolverSettings settings,
                   MeasurementSet data, std::vector<double> breakpoints, PriorMode mode,
                   GaussianPrior gaussian, std::optional<SmoothnessPrior> smoothness)
        : PosteriorModel(std::move(problem), std::move(refs), settings, std::move(data),
                         std::move(breakpoints), mode, std::move(gaussian), std::move(smoothness),
                         Options{}) {}

    const ParameterLayout& layout() const noexcept { return layout_; }
    PriorMode mode() const noexcept { return mode_; }
    const PhysicalProblem& problem() const noexcept { return problem_; }
    const ReferenceScales& refs() const noexcept { return refs_; }
    const SolverSettings& settings() const noexcept { return settings_; }
    const MeasurementSet& data() const noexcept { return data_; }
    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    const GaussianPrior& gaussian() const noexcept { return gaussian_; }
    const std::optional<SmoothnessPrior>& smoothness() const noexcept { return smoothness_; }

    /// Individual terms; non-positive components short-circuit to −∞ without a solve.
    PosteriorTerms terms(std::span<const double> p) const;
    double log_posterior(std::span<const double> p) const { return terms(p).total; }

    /// Sensor predictions for the physical part of p.
    Eigen::MatrixXd predict(std::span<const double> p) const;

private:
    PhysicalProblem problem_;
    ReferenceScales refs_;
    SolverSettings settings_;
    MeasurementSet data_;
    std::vector<double> breakpoints_;
    PriorMode mode_;
    GaussianPrior gaussian_;
    std::optional<SmoothnessPrior> smoothness_;
    Options options_;
    ParameterLayout layout_;
};

using LogDensity = std::function<double(std::span<const double>)>;
using Rng = std::mt19937_64;

struct MHConfig {
    std::size_t n_states = 0;         ///< N_s, including the initial state
    std::vector<double> step_fraction;  ///< ω_j, fractions of scale_j
    std::vector<double> scale;        ///< μ_j, typically prior means
    std::uint64_t seed = 0;
    std::size_t burn_in = 0;

    void validate(std::size_t dimension) const;
};

/// P*_j = P_j + ω_j·μ_j·u_j with u_j ~ U[−1, 1].
std::vector<double> propose(std::span<const double> current, std::span<const double> step_fraction,
                            std::span<const double> scale, Rng& rng);

/// MH states, one row per state. Row 0 is the initial state.
struct Chain {
    std::vector<std::string> names;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> samples;
    std::vector<std::uint8_t> accepted;  ///< accepted[0] is always 0
    std::vector<double> log_posterior;
    std::uint64_t seed = 0;

    std::size_t states() const noexcept { return static_cast<std::size_t>(samples.rows()); }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(samples.cols()); }
    std::vector<double> column(std::size_t j, std::size_t from = 0) const;
};

/// Receives every state in order: index, state, log-posterior, accepted flag.
using StateSink = std::function<void(std::size_t, std::span<const double>, double, bool)>;

/// Same Markov chain as run_chain, handed to `sink` instead of stored. For runs too long to keep in memory.
/// Throws DomainError if the initial state has a non-finite log-posterior.
void stream_chain(const MHConfig& config, const LogDensity& log_density, std::span<const double> initial,
                  const StateSink& sink);

/// Throws DomainError if the initial state has a non-finite log-posterior.
Chain run_chain(const MHConfig& config, const LogDensity& log_density, std::span<const double> initial,
                std::vector<std::string> names = {});

}  // namespace groundheat
