#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "groundheat/diagnostics.hpp"
#include "groundheat/inference.hpp"
#include "groundheat/io.hpp"
#include "support.hpp"

using namespace groundheat;

namespace {

const double kLn2Pi = std::log(2.0 * std::numbers::pi);
const double kNegInf = -std::numeric_limits<double>::infinity();

// Correlated 2D Gaussian target with mean (1, -2).
struct Gauss2 {
    double m0 = 1.0, m1 = -2.0;
    double s00 = 1.0, s01 = 0.6, s11 = 2.0;

    double operator()(std::span<const double> p) const {
        const double det = s00 * s11 - s01 * s01;
        const double a = p[0] - m0;
        const double b = p[1] - m1;
        return -0.5 * (s11 * a * a - 2 * s01 * a * b + s00 * b * b) / det;
    }
};

PosteriorModel small_model(PriorMode mode, std::size_t nt, PosteriorModel::Options options, double gamma0 = 2.22) {
    const double tf = 4 * 3600.0;
    const io::Forcing f = io::synthetic_forcing(tf, 0.05);
    PhysicalProblem problem(PhysicalProblemData{0.05, tf, MaterialParams(1.35, 0.94e6), f.air_temperature,
                                                f.net_radiation, f.deep_temperature, f.initial_profile});
    const auto times = io::observation_times(tf, 900.0);
    MeasurementSet data({0.0, 0.02}, times, Eigen::MatrixXd::Constant(2, long(times.size()), 293.0), 0.25);
    GaussianPrior g{{2.27, 2.1e6}, {0.1135, 0.021e6}, true};
    std::optional<SmoothnessPrior> smooth;
    if (mode == PriorMode::CaseAB) {
        g.mean.insert(g.mean.end(), nt, 10.0);
        g.std.insert(g.std.end(), nt, 5.0);
    } else {
        smooth = SmoothnessPrior{nt, gamma0};
    }
    return PosteriorModel(problem, ReferenceScales(3600, 300, 2.27, 2.1e6, 10), SolverSettings{11, 60.0}, data,
                          build_uniform_partition(tf, nt), mode, g, smooth, options);
}

}  // namespace

TEST_CASE("Gaussian log-likelihood") {
    const Eigen::MatrixXd y = Eigen::MatrixXd::Constant(1, 1, 300.0);
    CHECK(log_likelihood(y, y, 1.0) == doctest::Approx(-0.5 * kLn2Pi).epsilon(1e-15));
    CHECK(log_likelihood(y, y, 1.0) == doctest::Approx(-0.9189).epsilon(1e-4));
    const Eigen::MatrixXd t = Eigen::MatrixXd::Constant(1, 1, 299.0);
    CHECK(log_likelihood(y, t, 1.0) == doctest::Approx(-0.5 * kLn2Pi - 0.5).epsilon(1e-15));
    CHECK(log_likelihood(y, t, 1.0) == doctest::Approx(-1.4189).epsilon(1e-4));
    const Eigen::MatrixXd y3 = Eigen::MatrixXd::Constant(1, 3, 300.0);
    CHECK(log_likelihood(y3, y3, 2.0) - log_likelihood(y3, y3, 1.0) == doctest::Approx(-3 * std::log(2.0)));
    CHECK_THROWS_AS(log_likelihood(y3, y, 1.0), DomainError);
}

TEST_CASE("Gaussian prior") {
    const GaussianPrior prior{{2.27, 2.1e6, 10.0}, {0.1135, 0.021e6, 5.0}, true};
    const std::vector<double> at_mean{2.27, 2.1e6, 10.0};
    const double expected = -1.5 * kLn2Pi - std::log(0.1135) - std::log(0.021e6) - std::log(5.0);
    CHECK(log_gaussian_prior(at_mean, prior) == doctest::Approx(expected).epsilon(1e-14));
    const std::vector<double> shifted{2.27 + 0.1135, 2.1e6, 10.0};
    CHECK(log_gaussian_prior(shifted, prior) == doctest::Approx(expected - 0.5).epsilon(1e-14));
    const std::vector<double> neg{2.27, 2.1e6, -1.0};
    CHECK(log_gaussian_prior(neg, prior) == kNegInf);
    const std::vector<double> zero{0.0, 2.1e6, 10.0};
    CHECK(log_gaussian_prior(zero, prior) == kNegInf);
}

TEST_CASE("smoothness prior") {
    const SmoothnessPrior prior{4, 2.22};
    const std::vector<double> flat{7.0, 7.0, 7.0, 7.0};
    CHECK(squared_difference_norm(flat) == 0.0);
    CHECK(log_smoothness_prior(flat, 3.0, prior) == doctest::Approx(2.0 * std::log(3.0)));
    const SmoothnessPrior two{2, 2.22};
    const std::vector<double> ab{4.0, 6.5};
    CHECK(log_smoothness_prior(ab, 0.8, two) == doctest::Approx(std::log(0.8) - 0.4 * 6.25).epsilon(1e-15));
    CHECK(log_smoothness_prior(ab, 1e-300, two) < -600);
    CHECK(log_smoothness_prior(ab, 0.0, two) == kNegInf);
    CHECK(log_smoothness_prior(ab, -1.0, two) == kNegInf);
}

TEST_CASE("Rayleigh hyperprior") {
    const double g0 = 2.22;
    CHECK(log_rayleigh(g0, g0) == doctest::Approx(-std::log(g0) - 0.5).epsilon(1e-15));
    CHECK(log_rayleigh(g0, g0) == doctest::Approx(-1.2977).epsilon(5e-4));
    const double e = 1e-5;
    CHECK((log_rayleigh(g0 + e, g0) - log_rayleigh(g0 - e, g0)) / (2 * e) == doctest::Approx(0.0).epsilon(1e-8).scale(1));
    CHECK(log_rayleigh(g0, g0) > log_rayleigh(0.9 * g0, g0));
    CHECK(log_rayleigh(g0, g0) > log_rayleigh(1.1 * g0, g0));
    CHECK(log_rayleigh(0.0, g0) == kNegInf);
    CHECK(log_rayleigh(-2.0, g0) == kNegInf);
}

TEST_CASE("acceptance probability") {
    CHECK(acceptance_probability(-3.0, -3.0) == 1.0);
    CHECK(acceptance_probability(std::log(0.5), 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(acceptance_probability(5.0, 1.0) == 1.0);
    CHECK(acceptance_probability(kNegInf, -10.0) == 0.0);
    CHECK(acceptance_probability(kNegInf, kNegInf) == 0.0);
}

TEST_CASE("prior mode names") {
    CHECK(to_string(PriorMode::CaseAB) == "caseAB");
    CHECK(parse_prior_mode("caseC") == PriorMode::CaseC);
    CHECK_THROWS_AS(parse_prior_mode("caseD"), DomainError);
}

TEST_CASE("posterior model terms") {
    SUBCASE("caseAB") {
        const PosteriorModel m = small_model(PriorMode::CaseAB, 2, {});
        CHECK(m.layout().size() == 4);
        const std::vector<double> p{1.35, 0.94e6, 12.0, 9.0};
        const PosteriorTerms t = m.terms(p);
        CHECK(t.likelihood == log_likelihood(m.data().temperatures(), m.predict(p), 0.25));
        CHECK(t.gaussian == log_gaussian_prior(p, m.gaussian()));
        CHECK(t.smoothness == 0.0);
        CHECK(t.total == t.likelihood + t.gaussian);
        const std::vector<double> bad{1.35, 0.94e6, -12.0, 9.0};
        CHECK(m.log_posterior(bad) == kNegInf);
    }
    SUBCASE("caseC") {
        const PosteriorModel m = small_model(PriorMode::CaseC, 4, {});
        CHECK(m.layout().size() == 7);
        const std::vector<double> p{1.35, 0.94e6, 12.0, 9.0, 10.0, 11.0, 2.0};
        const PosteriorTerms t = m.terms(p);
        const std::vector<double> h{12.0, 9.0, 10.0, 11.0};
        CHECK(t.gaussian == log_gaussian_prior(std::span(p).first(2), m.gaussian()));
        CHECK(t.smoothness == log_smoothness_prior(h, 2.0, *m.smoothness()));
        CHECK(t.hyperprior == log_rayleigh(2.0, 2.22));
        CHECK(t.total == doctest::Approx(t.likelihood + t.gaussian + t.smoothness + t.hyperprior));
        const std::vector<double> bad{1.35, 0.94e6, 12.0, 9.0, 10.0, 11.0, 0.0};
        CHECK(m.log_posterior(bad) == kNegInf);
    }
    SUBCASE("likelihood switched off") {
        const PosteriorModel m = small_model(PriorMode::CaseAB, 2, {false, true});
        const std::vector<double> p{1.35, 0.94e6, 12.0, 9.0};
        CHECK(m.terms(p).likelihood == 0.0);
    }
    CHECK_THROWS_AS(small_model(PriorMode::CaseAB, 0, {}), DomainError);
}

TEST_CASE("proposal") {
    const std::vector<double> p{2.27, 2.1e6, 10.0};
    const std::vector<double> scale{2.27, 2.1e6, 10.0};
    Rng rng(11);
    const std::vector<double> zero(3, 0.0);
    CHECK(propose(p, zero, scale, rng) == p);

    const std::vector<double> w{0.02, 0.01, 0.3};
    const int n = 100000;
    std::vector<double> sum(3, 0.0);
    for (int k = 0; k < n; ++k) {
        const auto c = propose(p, w, scale, rng);
        for (int j = 0; j < 3; ++j) {
            const double d = c[j] - p[j];
            CHECK_FALSE(std::abs(d) > w[j] * scale[j]);
            sum[j] += d;
        }
    }
    for (int j = 0; j < 3; ++j) {
        const double se = w[j] * scale[j] / std::sqrt(3.0 * n);
        CHECK(std::abs(sum[j] / n) <= 3 * se);
    }
}

TEST_CASE("chain with zero step is constant and always accepts") {
    const MHConfig cfg{50, {0.0, 0.0}, {1.0, 1.0}, 5, 0};
    const std::vector<double> init{0.3, -0.7};
    const Chain c = run_chain(cfg, Gauss2{}, init, {"a", "b"});
    CHECK(c.states() == 50);
    for (std::size_t k = 0; k < 50; ++k) {
        CHECK(c.samples(long(k), 0) == 0.3);
        CHECK(c.samples(long(k), 1) == -0.7);
    }
    CHECK(acceptance_rate(c) == 1.0);
    CHECK(c.accepted[0] == 0);
}

TEST_CASE("chain bookkeeping and reproducibility") {
    const MHConfig cfg{5000, {1.0, 1.0}, {1.5, 2.0}, 17, 0};
    const std::vector<double> init{0.0, 0.0};
    const Chain a = run_chain(cfg, Gauss2{}, init);
    const Chain b = run_chain(cfg, Gauss2{}, init);
    CHECK((a.samples.array() == b.samples.array()).all());
    CHECK(a.accepted == b.accepted);

    std::size_t moved = 0;
    for (std::size_t k = 1; k < a.states(); ++k) {
        const bool changed = (a.samples.row(long(k)).array() != a.samples.row(long(k - 1)).array()).any();
        if (changed) CHECK(a.accepted[k] == 1);
        moved += changed;
    }
    const auto accepted = std::count(a.accepted.begin(), a.accepted.end(), 1);
    CHECK(std::size_t(accepted) == moved);

    const Gauss2 g;
    const LogDensity shifted = [&g](std::span<const double> p) { return g(p) + 1024.0; };
    const Chain s = run_chain(cfg, shifted, init);
    CHECK((s.samples.array() == a.samples.array()).all());

    const MHConfig other{5000, {1.0, 1.0}, {1.5, 2.0}, 18, 0};
    CHECK_FALSE((run_chain(other, Gauss2{}, init).samples.array() == a.samples.array()).all());
}

TEST_CASE("streamed chain matches the stored one") {
    const MHConfig cfg{3000, {1.0, 1.0}, {1.5, 2.0}, 23, 0};
    const std::vector<double> init{0.5, -0.5};
    const Chain a = run_chain(cfg, Gauss2{}, init);
    std::size_t seen = 0;
    bool same = true;
    stream_chain(cfg, Gauss2{}, init, [&](std::size_t k, std::span<const double> p, double lp, bool acc) {
        same = same && k == seen && p[0] == a.samples(long(k), 0) && p[1] == a.samples(long(k), 1) &&
               lp == a.log_posterior[k] && acc == bool(a.accepted[k]);
        ++seen;
    });
    CHECK(seen == 3000);
    CHECK(same);
}

TEST_CASE("non-finite initial state is rejected") {
    const MHConfig cfg{10, {1.0}, {1.0}, 1, 0};
    const LogDensity f = [](std::span<const double>) { return kNegInf; };
    const std::vector<double> init{1.0};
    CHECK_THROWS_AS(run_chain(cfg, f, init), DomainError);
}

TEST_CASE("2D Gaussian target is recovered") {
    const Gauss2 g;
    const MHConfig cfg{100000, {1.2, 1.2}, {2.0, 2.0}, 2024, 1000};
    const std::vector<double> init{0.0, 0.0};
    const Chain c = run_chain(cfg, g, init);
    const PosteriorSummary s = summarize(c, cfg.burn_in);
    const double truth[2] = {g.m0, g.m1};
    const double var[2] = {g.s00, g.s11};
    for (std::size_t j = 0; j < 2; ++j) {
        const double tau = autocovariance_and_iact(c, j, cfg.burn_in).iact;
        const double se = std::sqrt(var[j] * tau / double(c.states() - cfg.burn_in));
        CHECK(std::abs(s.mean[j] - truth[j]) <= 3 * se);
    }
    const auto x = c.column(0, cfg.burn_in);
    const auto y = c.column(1, cfg.burn_in);
    double cov = 0;
    for (std::size_t k = 0; k < x.size(); ++k) cov += (x[k] - s.mean[0]) * (y[k] - s.mean[1]);
    cov /= double(x.size() - 1);
    CHECK(testing::rel_diff(s.std[0] * s.std[0], g.s00) < 0.1);
    CHECK(testing::rel_diff(s.std[1] * s.std[1], g.s11) < 0.1);
    CHECK(testing::rel_diff(cov, g.s01) < 0.1);
}

TEST_CASE("transitions between coarse bins balance") {
    const LogDensity g = [](std::span<const double> p) { return -0.5 * p[0] * p[0]; };
    const MHConfig cfg{200000, {3.0}, {1.0}, 99, 0};
    const std::vector<double> init{0.0};
    const Chain c = run_chain(cfg, g, init);
    auto bin = [](double x) { return x < -0.5 ? 0 : (x < 0.5 ? 1 : 2); };
    long flow[3][3] = {};
    for (std::size_t k = 1; k < c.states(); ++k) ++flow[bin(c.samples(long(k - 1), 0))][bin(c.samples(long(k), 0))];
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b) {
            const double n = double(flow[a][b] + flow[b][a]);
            CHECK(n > 1000);
            CHECK(std::abs(double(flow[a][b] - flow[b][a])) <= 4 * std::sqrt(n));
        }
}

TEST_CASE("smoothness dominates as gamma0 grows without data") {
    std::vector<double> mean_norm;
    for (double g0 : {2.22, 3.33, 22.22}) {
        const PosteriorModel m = small_model(PriorMode::CaseC, 5, {false, true}, g0);
        const LogDensity f = [&m](std::span<const double> p) { return m.log_posterior(p); };
        const std::vector<double> init{2.27, 2.1e6, 10, 10, 10, 10, 10, g0};
        const std::vector<double> scale{2.27, 2.1e6, 10, 10, 10, 10, 10, g0};
        const std::vector<double> w{0.05, 0.01, 0.05, 0.05, 0.05, 0.05, 0.05, 0.3};
        const Chain c = run_chain(MHConfig{200000, w, scale, 3, 20000}, f, init);
        double acc = 0;
        for (std::size_t k = 20000; k < c.states(); ++k) {
            const auto row = c.samples.row(long(k));
            std::vector<double> h(row.data() + 2, row.data() + 7);
            acc += squared_difference_norm(h);
        }
        mean_norm.push_back(acc / double(c.states() - 20000));
    }
    MESSAGE("mean |Dh|^2: " << mean_norm[0] << " " << mean_norm[1] << " " << mean_norm[2]);
    CHECK(mean_norm[1] < mean_norm[0]);
    CHECK(mean_norm[2] < mean_norm[1]);
}
