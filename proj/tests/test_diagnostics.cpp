#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "groundheat/diagnostics.hpp"
#include "groundheat/errors.hpp"

using namespace groundheat;

namespace {

Chain make_chain(const std::vector<std::vector<double>>& columns) {
    Chain c;
    const std::size_t n = columns.front().size();
    c.samples.resize(long(n), long(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j)
        for (std::size_t k = 0; k < n; ++k) c.samples(long(k), long(j)) = columns[j][k];
    c.accepted.assign(n, 0);
    c.log_posterior.assign(n, 0.0);
    for (std::size_t j = 0; j < columns.size(); ++j) c.names.push_back("p" + std::to_string(j));
    return c;
}

std::vector<double> ar1(std::size_t n, double rho, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> x(n);
    x[0] = z(rng) / std::sqrt(1 - rho * rho);
    for (std::size_t k = 1; k < n; ++k) x[k] = rho * x[k - 1] + z(rng);
    return x;
}

}  // namespace

TEST_CASE("summary statistics") {
    const Chain constant = make_chain({std::vector<double>(20, 4.5)});
    const PosteriorSummary s = summarize(constant, 0);
    CHECK(s.mean[0] == 4.5);
    CHECK(s.std[0] == 0.0);

    std::vector<double> alt;
    for (int k = 0; k < 100; ++k) alt.push_back(k % 2 ? 3.0 : 1.0);
    CHECK(summarize(make_chain({alt}), 0).mean[0] == 2.0);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> z(3.0, 2.0);
    std::vector<double> draws(100000);
    for (double& v : draws) v = z(rng);
    const PosteriorSummary g = summarize(make_chain({draws}), 0);
    CHECK(std::abs(g.mean[0] - 3.0) <= 3 * 2.0 / std::sqrt(1e5));
    CHECK(std::abs(g.std[0] - 2.0) <= 3 * 2.0 / std::sqrt(2e5));
    CHECK_THROWS_AS(summarize(constant, 20), DomainError);
}

TEST_CASE("summary over a trimmed chain equals the trimmed summary") {
    const auto x = ar1(5000, 0.7, 3);
    const auto y = ar1(5000, 0.2, 4);
    const Chain c = make_chain({x, y});
    const std::size_t b = 1234;
    const Chain t = make_chain({std::vector<double>(x.begin() + b, x.end()), std::vector<double>(y.begin() + b, y.end())});
    const PosteriorSummary a = summarize(c, b);
    const PosteriorSummary d = summarize(t, 0);
    CHECK(a.mean == d.mean);
    CHECK(a.std == d.std);
}

TEST_CASE("acceptance rate") {
    Chain c = make_chain({std::vector<double>(11, 1.0)});
    CHECK(acceptance_rate(c) == 0.0);
    std::fill(c.accepted.begin() + 1, c.accepted.end(), 1);
    CHECK(acceptance_rate(c) == 1.0);
    c.accepted[3] = 0;
    CHECK(acceptance_rate(c) == doctest::Approx(0.9));
}

TEST_CASE("Geweke relative difference") {
    CHECK(geweke_relative_difference(make_chain({std::vector<double>(1000, 2.5)}))[0] == 0.0);

    std::vector<double> halves(1000, 2.0);
    std::fill(halves.begin() + 500, halves.end(), 5.0);
    // First 10% are all 2, last 50% all 5.
    CHECK(geweke_relative_difference(make_chain({halves}))[0] == doctest::Approx(3.0 / 5.0).epsilon(1e-15));

    std::vector<double> burn(1000, 9.0);
    std::fill(burn.begin() + 200, burn.end(), 4.0);
    CHECK(geweke_relative_difference(make_chain({burn}), 200)[0] == 0.0);
    CHECK_THROWS_AS(geweke_relative_difference(make_chain({burn}), 0, 0.6, 0.5), DomainError);
}

TEST_CASE("Geweke is invariant to positive scaling") {
    auto x = ar1(20000, 0.9, 8);
    for (double& v : x) v += 10.0;
    const double base = geweke_relative_difference(make_chain({x}), 1000)[0];
    for (double c : {0.5, 2.0, 1024.0, 3.7e6}) {
        std::vector<double> y = x;
        for (double& v : y) v *= c;
        CHECK(geweke_relative_difference(make_chain({y}), 1000)[0] == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("IACT of iid and AR(1) sequences") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> iid(100000);
    for (double& v : iid) v = u(rng);
    CHECK(autocovariance_and_iact(iid).iact == doctest::Approx(1.0).epsilon(0.1));

    const Autocorrelation a = autocovariance_and_iact(ar1(100000, 0.5, 42));
    CHECK(a.iact == doctest::Approx(3.0).epsilon(0.1));
    CHECK(double(a.window) >= 5.0 * a.iact);
    CHECK(a.autocovariance[1] / a.autocovariance[0] == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("autocovariance agrees with the direct sum") {
    const auto x = ar1(3000, 0.8, 9);
    const Autocorrelation a = autocovariance_and_iact(x, 50);
    REQUIRE(a.autocovariance.size() == 51);
    double m = 0;
    for (double v : x) m += v;
    m /= double(x.size());
    for (std::size_t k = 0; k <= 50; ++k) {
        double s = 0;
        for (std::size_t i = 0; i + k < x.size(); ++i) s += (x[i] - m) * (x[i + k] - m);
        CHECK(a.autocovariance[k] == doctest::Approx(s / double(x.size())).epsilon(1e-9));
    }
}

TEST_CASE("IACT is invariant to affine maps with positive slope") {
    const auto x = ar1(20000, 0.6, 10);
    std::vector<double> y = x;
    for (double& v : y) v = 3.5 * v - 40.0;
    CHECK(autocovariance_and_iact(y).iact == doctest::Approx(autocovariance_and_iact(x).iact).epsilon(1e-9));
}

TEST_CASE("IACT preconditions") {
    CHECK_THROWS_AS(autocovariance_and_iact(std::vector<double>(1000, 1.0)), DegenerateInput);
    CHECK_THROWS_AS(autocovariance_and_iact(std::vector<double>(99, 1.0)), DomainError);
}

TEST_CASE("autocovariance norm across parameters") {
    Autocorrelation a;
    a.autocovariance = {3.0, 1.0};
    Autocorrelation b;
    b.autocovariance = {4.0, 0.0, 7.0};
    const auto n = autocovariance_norm({a, b});
    REQUIRE(n.size() == 2);
    CHECK(n[0] == 5.0);
    CHECK(n[1] == 1.0);
}

TEST_CASE("histograms") {
    const Histogram h = histogram(std::vector<double>(50, 7.0), 12);
    CHECK(std::count(h.counts.begin(), h.counts.end(), 50u) == 1);

    std::vector<double> grid;
    for (int k = 0; k < 1000; ++k) grid.push_back(k / 1000.0);
    grid.push_back(1.0);
    const Histogram u = histogram(std::span(grid).first(1000), 10);
    for (auto c : u.counts) CHECK(c == 100);
    CHECK(u.edges.size() == 11);

    std::mt19937_64 rng(77);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> draws(100000);
    for (double& v : draws) v = z(rng);
    const std::size_t bins = freedman_diaconis_bins(draws);
    CHECK(bins >= 10);
    CHECK(bins <= 1000);
    const Histogram g = histogram(draws, 10);
    const auto cdf = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    for (std::size_t b = 0; b < 10; ++b) {
        const double p = cdf(g.edges[b + 1]) - cdf(g.edges[b]);
        const double se = std::sqrt(p * (1 - p) / 1e5);
        // Edges depend on the sample extremes; allow for the outermost bins.
        CHECK(std::abs(double(g.counts[b]) / 1e5 - p) <= 3 * se + 1e-5);
    }
    std::size_t total = 0;
    for (auto c : g.counts) total += c;
    CHECK(total == draws.size());
    CHECK(freedman_diaconis_bins(std::vector<double>(5, 1.0)) == 10);
}

TEST_CASE("residual report") {
    const Eigen::MatrixXd y = (Eigen::MatrixXd(2, 3) << 300, 301, 302, 290, 291, 292).finished();
    const ResidualReport same = residual_report(y, y, 0.25);
    CHECK(same.residuals.isZero(0));
    CHECK(same.within_sigma_total == 1.0);

    const Eigen::MatrixXd one = Eigen::MatrixXd::Constant(1, 1, 300.0);
    const Eigen::MatrixXd pred = Eigen::MatrixXd::Constant(1, 1, 299.0);
    const ResidualReport r = residual_report(one, pred, 0.25);
    CHECK(r.residuals(0, 0) == 1.0);
    CHECK(r.max_abs[0] == 1.0);
    CHECK(r.max_relative_pct[0] == doctest::Approx(100.0 / 300.0));
    CHECK(r.within_sigma[0] == 0.0);

    const Eigen::MatrixXd t = (Eigen::MatrixXd(2, 3) << 300.1, 300.5, 302, 290.3, 291, 291.9).finished();
    const ResidualReport a = residual_report(y, t, 0.25);
    const ResidualReport b = residual_report(t, y, 0.25);
    CHECK((a.residuals.array() == -b.residuals.array()).all());
    CHECK(a.max_abs == b.max_abs);
    CHECK(a.within_sigma == b.within_sigma);
    CHECK_THROWS_AS(residual_report(y, one, 0.25), DomainError);
}
