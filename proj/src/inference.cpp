#include "groundheat/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <spdlog/spdlog.h>

namespace groundheat {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void GaussianPrior::validate() const {
    if (mean.size() != std.size()) throw DomainError("Gaussian prior: mean and std differ in length");
    for (double s : std)
        if (!(s > 0) || !std::isfinite(s)) throw DomainError("Gaussian prior: std must be positive");
}

void SmoothnessPrior::validate() const {
    if (size < 2) throw DomainError("smoothness prior needs at least 2 intervals");
    if (!(gamma0 > 0) || !std::isfinite(gamma0)) throw DomainError("smoothness prior: gamma0 must be positive");
}

double log_likelihood(const Eigen::MatrixXd& measured, const Eigen::MatrixXd& predicted, double noise_std) {
    if (measured.rows() != predicted.rows() || measured.cols() != predicted.cols())
        throw DomainError("likelihood: measurement and prediction shapes differ");
    if (!(noise_std > 0)) throw DomainError("likelihood: noise std must be positive");
    const auto D = static_cast<double>(measured.size());
    const double chi2 = (measured - predicted).squaredNorm() / (noise_std * noise_std);
    return -0.5 * D * std::log(2.0 * std::numbers::pi) - D * std::log(noise_std) - 0.5 * chi2;
}

double log_gaussian_prior(std::span<const double> values, const GaussianPrior& prior) {
    if (values.size() != prior.mean.size()) throw DomainError("Gaussian prior: length mismatch");
    const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
    double lp = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (prior.positive && !(values[i] > 0)) return kNegInf;
        const double z = (values[i] - prior.mean[i]) / prior.std[i];
        lp += -half_log_2pi - std::log(prior.std[i]) - 0.5 * z * z;
    }
    return lp;
}

double squared_difference_norm(std::span<const double> h) {
    double s = 0;
    for (std::size_t i = 1; i < h.size(); ++i) {
        const double d = h[i] - h[i - 1];
        s += d * d;
    }
    return s;
}

double log_smoothness_prior(std::span<const double> h, double gamma, const SmoothnessPrior& prior) {
    if (h.size() != prior.size) throw DomainError("smoothness prior: length mismatch");
    if (!(gamma > 0)) return kNegInf;
    // γ^{N_t/2} normalization, although rank(DᵀD) = N_t − 1.
    return 0.5 * static_cast<double>(prior.size) * std::log(gamma) - 0.5 * gamma * squared_difference_norm(h);
}

double log_rayleigh(double gamma, double gamma0) {
    if (!(gamma0 > 0)) throw DomainError("Rayleigh scale must be positive");
    if (!(gamma > 0)) return kNegInf;
    const double z = gamma / gamma0;
    return std::log(gamma) - 2.0 * std::log(gamma0) - 0.5 * z * z;
}

double acceptance_probability(double log_post_candidate, double log_post_current) {
    if (log_post_candidate == kNegInf) return 0.0;
    if (std::isnan(log_post_candidate) || std::isnan(log_post_current)) return 0.0;
    if (log_post_current == kNegInf) return 1.0;
    const double delta = log_post_candidate - log_post_current;
    return delta >= 0 ? 1.0 : std::exp(delta);
}

std::string to_string(PriorMode mode) { return mode == PriorMode::CaseAB ? "caseAB" : "caseC"; }

PriorMode parse_prior_mode(const std::string& text) {
    if (text == "caseAB") return PriorMode::CaseAB;
    if (text == "caseC") return PriorMode::CaseC;
    throw DomainError("unknown mode '" + text + "' (expected caseAB or caseC)");
}

PosteriorModel::PosteriorModel(PhysicalProblem problem, ReferenceScales refs, SolverSettings settings,
                               MeasurementSet data, std::vector<double> breakpoints, PriorMode mode,
                               GaussianPrior gaussian, std::optional<SmoothnessPrior> smoothness,
                               Options options)
    : problem_(std::move(problem)), refs_(std::move(refs)), settings_(settings), data_(std::move(data)),
      breakpoints_(std::move(breakpoints)), mode_(mode), gaussian_(std::move(gaussian)),
      smoothness_(std::move(smoothness)), options_(options),
      layout_(breakpoints_.empty() ? 0 : breakpoints_.size() - 1, mode == PriorMode::CaseC) {
    SurfaceCoefficient(breakpoints_, std::vector<double>(layout_.intervals(), 1.0));
    data_.check_within(problem_.depth(), problem_.final_time());
    settings_.steps(problem_.final_time());
    gaussian_.validate();
    if (mode_ == PriorMode::CaseAB) {
        if (gaussian_.mean.size() != layout_.physical_size())
            throw DomainError("caseAB prior must cover kappa, C and every h interval");
    } else {
        if (gaussian_.mean.size() != 2) throw DomainError("caseC Gaussian prior must cover kappa and C");
        if (!smoothness_) throw DomainError("caseC needs a smoothness prior");
        smoothness_->validate();
        if (smoothness_->size != layout_.intervals())
            throw DomainError("smoothness prior size differs from the number of h intervals");
    }
}

Eigen::MatrixXd PosteriorModel::predict(std::span<const double> p) const {
    return predict_temperatures(problem_, refs_, settings_, p.first(layout_.physical_size()), breakpoints_,
                                data_);
}

PosteriorTerms PosteriorModel::terms(std::span<const double> p) const {
    if (p.size() != layout_.size()) throw DomainError("parameter vector length does not match the model");
    PosteriorTerms t;
    for (double v : p) {
        if (!(v > 0) || !std::isfinite(v)) {
            t.total = kNegInf;
            return t;
        }
    }
    const std::size_t nt = layout_.intervals();
    const auto h = p.subspan(2, nt);
    if (mode_ == PriorMode::CaseAB) {
        t.gaussian = log_gaussian_prior(p.first(layout_.physical_size()), gaussian_);
    } else {
        t.gaussian = log_gaussian_prior(p.first(2), gaussian_);
        const double gamma = p[layout_.gamma_index()];
        t.smoothness = log_smoothness_prior(h, gamma, *smoothness_);
        if (options_.use_hyperprior) t.hyperprior = log_rayleigh(gamma, smoothness_->gamma0);
    }
    if (options_.use_likelihood) {
        try {
            t.likelihood = log_likelihood(data_.temperatures(), predict(p), data_.noise_std());
        } catch (const NumericalFailure& e) {
            spdlog::warn("forward solve failed, candidate rejected: {}", e.what());
            t.likelihood = kNegInf;
        }
    }
    t.total = t.likelihood + t.gaussian + t.smoothness + t.hyperprior;
    if (std::isnan(t.total)) t.total = kNegInf;
    return t;
}

void MHConfig::validate(std::size_t dimension) const {
    if (n_states < 1) throw DomainError("MH chain needs at least one state");
    if (step_fraction.size() != dimension || scale.size() != dimension)
        throw DomainError("MH step radii and scales must match the parameter dimension");
    for (double w : step_fraction)
        if (!(w >= 0) || !std::isfinite(w)) throw DomainError("MH step radii must be non-negative");
    for (double s : scale)
        if (!std::isfinite(s)) throw DomainError("MH proposal scales must be finite");
    if (burn_in >= n_states) throw DomainError("burn-in must be shorter than the chain");
}

std::vector<double> propose(std::span<const double> current, std::span<const double> step_fraction,
                            std::span<const double> scale, Rng& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> candidate(current.begin(), current.end());
    for (std::size_t j = 0; j < candidate.size(); ++j) {
        const double u = unit(rng);
        if (step_fraction[j] != 0.0) candidate[j] += step_fraction[j] * scale[j] * u;
    }
    return candidate;
}

std::vector<double> Chain::column(std::size_t j, std::size_t from) const {
    std::vector<double> c;
    c.reserve(states() - std::min(from, states()));
    for (std::size_t k = from; k < states(); ++k) c.push_back(samples(static_cast<long>(k), static_cast<long>(j)));
    return c;
}

void stream_chain(const MHConfig& config, const LogDensity& log_density, std::span<const double> initial,
                  const StateSink& sink) {
    config.validate(initial.size());
    std::vector<double> current(initial.begin(), initial.end());
    double current_lp = log_density(current);
    if (!std::isfinite(current_lp)) throw DomainError("initial state has a non-finite log-posterior");

    Rng rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    sink(0, current, current_lp, false);
    for (std::size_t k = 1; k < config.n_states; ++k) {
        std::vector<double> candidate = propose(current, config.step_fraction, config.scale, rng);
        const double candidate_lp = log_density(candidate);
        const double alpha = acceptance_probability(candidate_lp, current_lp);
        const double u = unit(rng);
        const bool accept = alpha > 0 && u <= alpha;
        if (accept) {
            current = std::move(candidate);
            current_lp = candidate_lp;
        }
        sink(k, current, current_lp, accept);
    }
}

Chain run_chain(const MHConfig& config, const LogDensity& log_density, std::span<const double> initial,
                std::vector<std::string> names) {
    const std::size_t dim = initial.size();
    config.validate(dim);
    if (!names.empty() && names.size() != dim) throw DomainError("chain names must match the dimension");

    Chain chain;
    chain.names = std::move(names);
    chain.seed = config.seed;
    chain.samples.resize(static_cast<long>(config.n_states), static_cast<long>(dim));
    chain.accepted.assign(config.n_states, 0);
    chain.log_posterior.assign(config.n_states, 0.0);
    stream_chain(config, log_density, initial, [&](std::size_t k, std::span<const double> p, double lp, bool acc) {
        for (std::size_t j = 0; j < dim; ++j) chain.samples(static_cast<long>(k), static_cast<long>(j)) = p[j];
        chain.log_posterior[k] = lp;
        chain.accepted[k] = acc;
    });
    return chain;
}

}  // namespace groundheat
