#include "doctest.h"
#include "oracles.hpp"

#include "gms/continuum.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace gms;

namespace {

constexpr double pi = std::numbers::pi;

// int_0^inf t^k exp(-t^2/2) dt
double gaussian_moment(double k) { return std::pow(2.0, 0.5 * (k - 1)) * std::tgamma(0.5 * (k + 1)); }

// int_0^a t^2 exp(-t^2 / (2 s^2)) dt
double truncated_second_moment(double s, double a) {
    return s * s * s * (std::sqrt(pi / 2) * std::erf(a / (s * std::sqrt(2.0))) - a / s * std::exp(-a * a / (2 * s * s)));
}

} // namespace

TEST_CASE("unit ball volumes") {
    CHECK(omega_ball_volume(0) == 1.0);
    CHECK(omega_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(omega_ball_volume(2) == doctest::Approx(pi).epsilon(1e-15));
    CHECK(omega_ball_volume(3) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(omega_ball_volume(-1), ValidationError);
}

TEST_CASE("sphere factor against Monte Carlo") {
    CHECK(oracle::mc_sphere_moment(1.0, 2, 1000000, 1) == doctest::Approx(2.0 * omega_ball_volume(1)).epsilon(0.01));
    for (const auto& [p, d] : {std::pair{2.0, 2}, std::pair{3.0, 2}, std::pair{2.0, 3}}) {
        const double mc = oracle::mc_sphere_moment(p, d, 1000000, 2 + d);
        CHECK(sphere_moment_factor(p, d) == doctest::Approx(mc).epsilon(0.01));
    }
}

TEST_CASE("theta for the Gaussian profile in the plane is 2 pi") {
    CHECK(theta_eta(2.0, 0.0, 2, RadialKernel::gaussian()) == doctest::Approx(2.0 * pi).epsilon(1e-10));
    CHECK(oracle::mc_theta_gaussian(2.0, 0.0, 2, 1000000, 9) == doctest::Approx(2.0 * pi).epsilon(0.01));
}

TEST_CASE("q approaching p leaves only t^{d-1} eta") {
    for (int d = 1; d <= 4; ++d)
        for (double p : {1.0, 2.0, 3.5}) {
            const double expect = sphere_moment_factor(p, d) * gaussian_moment(d - 1.0);
            CHECK(theta_eta(p, p * (1.0 - 1e-12), d, RadialKernel::gaussian()) == doctest::Approx(expect).epsilon(1e-9));
        }
}

TEST_CASE("sigma examples") {
    CHECK(sigma_eta(2, RadialKernel::gaussian()) == doctest::Approx(4.0 * std::sqrt(pi / 2)).epsilon(1e-10));
    CHECK(sigma_eta(2, RadialKernel::indicator(1.0)) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(sigma_eta(2, RadialKernel::zero()), AssumptionViolation);
    CHECK_THROWS_AS(theta_eta(2.0, 0.0, 2, RadialKernel::zero()), AssumptionViolation);
    CHECK_THROWS_AS(sigma_eta(2, RadialKernel::inverse()), AssumptionViolation);
    CHECK(oracle::mc_sigma_gaussian(2, 1000000, 4) == doctest::Approx(4.0 * std::sqrt(pi / 2)).epsilon(0.01));
}

TEST_CASE("truncated Gaussian constants match the erf closed form") {
    for (double s : {0.2, 0.5, 1.0})
        for (double c : {1.0, 2.0, 3.0}) {
            const auto eta = truncated_gaussian(s, c);
            CHECK(sigma_eta(2, eta) == doctest::Approx(4.0 * truncated_second_moment(s, c * s)).epsilon(1e-10));
        }
}

TEST_CASE("property: constants are linear in eta") {
    oracle::Gen g(1);
    for (int trial = 0; trial < 20; ++trial) {
        const double c = g.uniform(0.01, 100.0), p = g.uniform(1.0, 4.0), q = g.uniform(0.0, p - 0.01);
        const int d = g.integer(1, 4);
        const auto eta = RadialKernel::gaussian(g.uniform(0.3, 2.0));
        CHECK(theta_eta(p, q, d, eta.scaled(c)) == doctest::Approx(c * theta_eta(p, q, d, eta)).epsilon(1e-12));
        CHECK(sigma_eta(d, eta.scaled(c)) == doctest::Approx(c * sigma_eta(d, eta)).epsilon(1e-12));
    }
}

TEST_CASE("property: q enters only through the radial integral") {
    oracle::Gen g(2);
    for (int trial = 0; trial < 30; ++trial) {
        const double p = g.uniform(1.0, 4.0), q1 = g.uniform(0.0, p - 0.01), q2 = g.uniform(0.0, p - 0.01);
        const int d = g.integer(1, 4);
        const double ratio = theta_eta(p, q1, d, RadialKernel::gaussian()) / theta_eta(p, q2, d, RadialKernel::gaussian());
        const double expect = gaussian_moment(p - q1 + d - 1) / gaussian_moment(p - q2 + d - 1);
        CHECK(ratio == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("exponent validation") {
    CHECK_THROWS_AS(theta_eta(0.5, 0.0, 2, RadialKernel::gaussian()), ValidationError);
    CHECK_THROWS_AS(theta_eta(2.0, 2.0, 2, RadialKernel::gaussian()), ValidationError);
}

TEST_CASE("limit constants collect zeta data") {
    const auto ms = limit_constants(ZetaSpec::ms_arctan(), RadialKernel::gaussian(), 2.0, 0.0, 2);
    CHECK(ms.theta == doctest::Approx(2.0 * pi));
    CHECK(ms.zeta_prime0 == 1.0);
    CHECK(ms.theta_big.value() == 1.0);
    const auto lap = limit_constants(ZetaSpec::quadratic(), RadialKernel::gaussian(), 2.0, 0.0, 2);
    CHECK_FALSE(lap.theta_big.has_value());
}

TEST_CASE("continuum functional examples") {
    const auto k = limit_constants(ZetaSpec::ms_arctan(), RadialKernel::gaussian(), 2.0, 0.0, 2);
    CHECK(continuum_ms(k, TestCase::step()) == doctest::Approx(k.sigma * 1.0).epsilon(1e-12));
    CHECK(continuum_ms(k, TestCase::smooth()) == doctest::Approx(2.0 * pi * 2.0 * pi * pi).epsilon(1e-8));
    CHECK(continuum_ms(k, TestCase::step(2, 0.5, 0.3, 0.3)) == 0.0);
    const auto lap = limit_constants(ZetaSpec::quadratic(), RadialKernel::gaussian(), 2.0, 0.0, 2);
    CHECK_THROWS_AS(continuum_ms(lap, TestCase::step()), ValidationError);
    CHECK_NOTHROW(continuum_ms(lap, TestCase::smooth()));
}

TEST_CASE("cube quadrature integrates polynomials and trigonometric functions") {
    CHECK(cube_quadrature(2, [](const double*) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(cube_quadrature(3, [](const double* x) { return x[0] * x[1] * x[2]; }) == doctest::Approx(0.125).epsilon(1e-13));
    CHECK(cube_quadrature(2, [](const double* x) { return std::pow(std::cos(2 * pi * x[0]), 2); }) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("noise offset: pure noise gives its variance") {
    const auto r = noise_offset_experiment(TestCase::noisy_fidelity(2, 0.0, 1.0), 10000, 100, 3);
    CHECK(r.samples == 1000000);
    CHECK(r.expected == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(std::abs(r.mean - 1.0 / 3.0) <= 3.0 * r.standard_error);
    CHECK(r.standard_error < 1e-3);
}

TEST_CASE("noise offset: constant offset adds its square") {
    const auto r = noise_offset_experiment(TestCase::noisy_fidelity(2, 0.5, 1.0), 10000, 100, 4);
    CHECK(r.expected == doctest::Approx(0.25 + 1.0 / 3.0).epsilon(1e-15));
    CHECK(std::abs(r.mean - r.expected) <= 3.0 * r.standard_error);
    const auto exact = noise_offset_experiment(TestCase::noisy_fidelity(2, 0.5, 0.0), 100, 3, 4);
    CHECK(exact.mean == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(exact.standard_error == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("noise offset: invalid laws and sizes") {
    auto gauss = TestCase::noisy_fidelity();
    gauss.gaussian_noise = true;
    CHECK_THROWS_AS(noise_offset_experiment(gauss, 100, 10, 1), ValidationError);
    CHECK_THROWS_AS(noise_offset_experiment(TestCase::noisy_fidelity(2, 0.0, -1.0), 100, 10, 1), ValidationError);
    CHECK_THROWS_AS(noise_offset_experiment(TestCase::noisy_fidelity(), 0, 10, 1), ValidationError);
}

TEST_CASE("gamma experiment rows") {
    const auto tc = TestCase::smooth();
    const std::vector<std::size_t> ns{400, 1600};
    const auto rows = gamma_experiment(tc, ns, EpsRule{}, ZetaSpec::ms_arctan(), 2.0, 0.0, 5);
    REQUIRE(rows.size() == 2);
    const auto k = limit_constants(ZetaSpec::ms_arctan(), truncated_gaussian(0.2, 3.0), 2.0, 0.0, 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(rows[i].n == ns[i]);
        CHECK(rows[i].eps == doctest::Approx(0.7 * std::pow(ns[i], -0.25)));
        CHECK(rows[i].continuum == doctest::Approx(continuum_ms(k, tc)).epsilon(1e-12));
        CHECK(rows[i].ratio == doctest::Approx(rows[i].discrete / rows[i].continuum).epsilon(1e-15));
        CHECK(rows[i].discrete > 0.0);
    }
    const auto again = gamma_experiment(tc, ns, EpsRule{}, ZetaSpec::ms_arctan(), 2.0, 0.0, 5);
    CHECK(again[1].discrete == rows[1].discrete);
    CHECK_THROWS_AS(gamma_experiment(tc, {0}, EpsRule{}, ZetaSpec::ms_arctan(), 2.0, 0.0, 5), ValidationError);

    std::ostringstream os;
    write_gamma_csv(os, rows);
    CHECK(os.str().rfind("n,eps,discrete,continuum,ratio,seed\n", 0) == 0);
}

namespace {

// Exact expectation of discrete/continuum for the unit step on [0,1]^2 with the
// truncated Gaussian kernel of width ks and cutoff c (in units of ks). Pairs
// crossing x_1 = 1/2 at displacement h carry mass h_1 (1 - |h_2|); in polar
// coordinates the two pieces integrate to 2 m2 and m3 below.
double expected_step_ratio(std::size_t n, double ks = 0.2, double c = 3.0) {
    const double eps = 0.7 * std::pow(static_cast<double>(n), -0.25);
    const double zeta = 2.0 / pi * std::atan(pi / (2.0 * eps));
    const double a = 0.5 * c * c;
    const double j = truncated_second_moment(ks, c * ks);
    const double m3 = 2.0 * std::pow(ks, 4) * (1.0 - (1.0 + a) * std::exp(-a));
    return (n - 1.0) / n * zeta * (1.0 - eps * m3 / (2.0 * j));
}

} // namespace

TEST_CASE("step-case ratios average to the exact expectation") {
    const double expect = expected_step_ratio(1000);
    CHECK(expect == doctest::Approx(0.93048).epsilon(1e-4));
    double sum = 0.0, sq = 0.0;
    const int seeds = 1000;
    for (int s = 0; s < seeds; ++s) {
        const double r = gamma_experiment(TestCase::step(), {1000}, EpsRule{}, ZetaSpec::ms_arctan(), 2.0, 0.0,
                                          static_cast<std::uint64_t>(5000 + s))[0].ratio;
        sum += r;
        sq += r * r;
    }
    const double mean = sum / seeds;
    const double se = std::sqrt((sq / seeds - mean * mean) / (seeds - 1));
    CHECK(std::abs(mean - expect) <= 4.0 * se);
    // the expectation approaches 1 monotonically along the acceptance grid
    double prev = 0.0;
    for (std::size_t n : {1000u, 4000u, 16000u, 64000u}) {
        const double r = expected_step_ratio(n);
        CHECK(r > prev);
        CHECK(r < 1.0);
        prev = r;
    }
}
