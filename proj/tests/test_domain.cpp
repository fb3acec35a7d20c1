#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "groundheat/domain.hpp"
#include "groundheat/errors.hpp"

using namespace groundheat;

namespace {
const std::vector<double> kCaseA{0.0, 6 * 3600.0, 18 * 3600.0, 28 * 3600.0};
const std::vector<double> kCaseAValues{12.65, 8.47, 10.86};
}  // namespace

TEST_CASE("surface coefficient, single interval") {
    SurfaceCoefficient h({0.0, 28 * 3600.0}, {10.0});
    CHECK(evaluate_surface_coefficient(h, 3 * 3600.0) == 10.0);
    CHECK(evaluate_surface_coefficient(h, 0.0) == 10.0);
    CHECK(evaluate_surface_coefficient(h, 28 * 3600.0) == 10.0);
}

TEST_CASE("surface coefficient, three intervals with left-closed breakpoints") {
    SurfaceCoefficient h(kCaseA, kCaseAValues);
    CHECK(evaluate_surface_coefficient(h, 12 * 3600.0) == 8.47);
    CHECK(evaluate_surface_coefficient(h, 6 * 3600.0) == 8.47);
    CHECK(evaluate_surface_coefficient(h, 18 * 3600.0) == 10.86);
    CHECK(evaluate_surface_coefficient(h, 28 * 3600.0) == 10.86);
    CHECK(evaluate_surface_coefficient(h, 0.0) == 12.65);
    CHECK_THROWS_AS(evaluate_surface_coefficient(h, -1.0), DomainError);
    CHECK_THROWS_AS(evaluate_surface_coefficient(h, 28 * 3600.0 + 1.0), DomainError);
}

TEST_CASE("exactly one basis function is active everywhere") {
    SurfaceCoefficient h(kCaseA, kCaseAValues);
    for (int k = 0; k <= 1000; ++k) {
        const double t = 28 * 3600.0 * k / 1000.0;
        int active = 0;
        const std::size_t idx = h.interval_index(t);
        for (std::size_t i = 0; i < h.intervals(); ++i) {
            const bool in = i == idx;
            const bool inside = t >= kCaseA[i] && (t < kCaseA[i + 1] || (i + 1 == h.intervals() && t <= kCaseA[i + 1]));
            CHECK(in == inside);
            active += in;
        }
        CHECK(active == 1);
    }
}

TEST_CASE("sampling at interval midpoints returns the values") {
    const std::vector<double> b = build_uniform_partition(100800.0, 7);
    std::vector<double> v{3.0, 1.5, 2.25, 9.0, 4.0, 7.75, 0.5};
    SurfaceCoefficient h(b, v);
    for (std::size_t i = 0; i < v.size(); ++i)
        CHECK(evaluate_surface_coefficient(h, 0.5 * (b[i] + b[i + 1])) == v[i]);
}

TEST_CASE("uniform partition") {
    const double h = 3600.0;
    auto p = build_uniform_partition(28 * h, 4);
    REQUIRE(p.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(p[i] == doctest::Approx(7 * h * i));
    CHECK(p.back() == 28 * h);

    auto fine = build_uniform_partition(28 * h, 112);
    REQUIRE(fine.size() == 113);
    for (std::size_t i = 0; i + 1 < fine.size(); ++i) CHECK(fine[i + 1] - fine[i] == doctest::Approx(900.0));

    auto unit = build_uniform_partition(1.0, 1);
    CHECK(unit == std::vector<double>{0.0, 1.0});
    CHECK_THROWS_AS(build_uniform_partition(1.0, 0), DomainError);
}

TEST_CASE("surface coefficient validation") {
    CHECK_THROWS_AS(SurfaceCoefficient({0.0, 1.0}, {0.0}), DomainError);
    CHECK_THROWS_AS(SurfaceCoefficient({0.0, 1.0}, {1.0, 2.0}), DomainError);
    CHECK_THROWS_AS(SurfaceCoefficient({0.0, 2.0, 1.0}, {1.0, 2.0}), DomainError);
    CHECK_THROWS_AS(SurfaceCoefficient({1.0, 2.0}, {1.0}), DomainError);
}

TEST_CASE("reference scales give the expected groups") {
    ReferenceScales refs(3600.0, 300.0, 2.27, 2.1e6, 10.0);
    // Fo = 2.27·3600 / (2.1e6·0.0025) = 8172 / 5250
    CHECK(refs.fourier(0.05) == doctest::Approx(8172.0 / 5250.0).epsilon(1e-14));
    CHECK(refs.fourier(0.05) == doctest::Approx(1.5566).epsilon(1e-4));
    CHECK(refs.biot(0.05) == doctest::Approx(0.5 / 2.27).epsilon(1e-14));
    CHECK(refs.biot(0.05) == doctest::Approx(0.22026).epsilon(1e-4));
    CHECK_THROWS_AS(ReferenceScales(0.0, 300.0, 1.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(ReferenceScales(1.0, 300.0, -1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("parameter pack and unpack are inverse") {
    const std::vector<double> h{12.65, 8.47, 10.86};
    for (std::optional<double> gamma : {std::optional<double>{}, std::optional<double>{2.22}}) {
        const ParameterVector p = ParameterVector::pack(1.35, 0.94e6, h, gamma);
        CHECK(p.size() == (gamma ? 6u : 5u));
        const UnpackedParameters u = p.unpack();
        CHECK(u.conductivity == 1.35);
        CHECK(u.heat_capacity == 0.94e6);
        CHECK(u.h == h);
        CHECK(u.gamma == gamma);
        const ParameterVector again = ParameterVector::pack(u.conductivity, u.heat_capacity, u.h, u.gamma);
        CHECK(again.values() == p.values());
        CHECK(again.layout() == p.layout());
    }
}

TEST_CASE("parameter layout names and indices") {
    ParameterLayout ab(3, false);
    CHECK(ab.names() == std::vector<std::string>{"kappa", "C", "h1", "h2", "h3"});
    CHECK_THROWS_AS(ab.gamma_index(), DomainError);
    ParameterLayout c(112, true);
    CHECK(c.size() == 115);
    CHECK(c.physical_size() == 114);
    CHECK(c.gamma_index() == 114);
    CHECK(c.names().back() == "gamma");
    CHECK(c.names()[113] == "h112");
}

TEST_CASE("parameter vector rejects non-positive components") {
    const std::vector<double> h{1.0, -1.0};
    CHECK_THROWS_AS(ParameterVector::pack(1.0, 1.0, h), DomainError);
    CHECK_THROWS_AS(ParameterVector(ParameterLayout(1, false), {1.0, 1.0}), DomainError);
}

TEST_CASE("time series and depth profile") {
    TimeSeries s({0.0, 10.0}, {10.0, 20.0});
    CHECK(s.at(5.0) == 15.0);
    CHECK(s.at(10.0) == 20.0);
    CHECK_THROWS_AS(s.at(11.0), DomainError);
    CHECK_THROWS_AS(TimeSeries({0.0, 0.0}, {1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(TimeSeries({0.0, 1.0}, {1.0, NAN}), DomainError);

    DepthProfile p({0.0, 0.04}, {300.0, 308.0});
    CHECK(p.at(0.02) == doctest::Approx(304.0));
    CHECK(p.at(0.05) == 308.0);
    CHECK(DepthProfile::uniform(300.0).at(0.3) == 300.0);
}

TEST_CASE("measurement set bounds") {
    MeasurementSet m({0.0, 0.04}, {0.0, 900.0}, Eigen::MatrixXd::Constant(2, 2, 300.0), 0.25);
    CHECK(m.size() == 4);
    CHECK_NOTHROW(m.check_within(0.05, 900.0));
    CHECK_THROWS_AS(m.check_within(0.03, 900.0), DomainError);
    CHECK_THROWS_AS(m.check_within(0.05, 800.0), DomainError);
    CHECK_THROWS_AS(MeasurementSet({0.0}, {0.0}, Eigen::MatrixXd::Zero(2, 1), 0.25), DomainError);
}
