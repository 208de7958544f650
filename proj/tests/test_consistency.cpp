#include "doctest.h"
#include "oracles.hpp"

#include "gms/consistency.hpp"
#include "gms/parallel.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numeric>
#include <sstream>

using namespace gms;

TEST_CASE("quadrant centers give unit density") {
    const PointCloud c(2, {0.25, 0.25, 0.75, 0.25, 0.25, 0.75, 0.75, 0.75});
    const auto m = bin_measure(c, 0.5);
    CHECK(m.boxes_per_axis == 2);
    for (double v : m.density) CHECK(v == 1.0);
    CHECK(m.sup_deviation() == 0.0);
}

TEST_CASE("all points in one box") {
    const PointCloud c(2, {0.01, 0.02, 0.03, 0.04, 0.05, 0.06});
    const auto m = bin_measure(c, 0.25);
    CHECK(m.density[0] == doctest::Approx(16.0));
    for (std::size_t j = 1; j < m.density.size(); ++j) CHECK(m.density[j] == 0.0);
    CHECK(m.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("box side must divide the unit interval") {
    const PointCloud c(1, {0.5});
    CHECK_THROWS_AS(bin_measure(c, 0.3), ValidationError);
    CHECK_THROWS_AS(bin_measure(c, 0.0), ValidationError);
    CHECK_NOTHROW(bin_measure(c, 1.0 / 7.0));
    CHECK_THROWS_AS(bin_measure(PointCloud(1, {1.5}), 0.5), ValidationError);
}

TEST_CASE("coordinate 1 falls in the last box") {
    const PointCloud c(2, {1.0, 1.0, 0.0, 1.0});
    const auto m = bin_measure(c, 0.5);
    // axis 0 fastest: box index = ix + 2 iy
    CHECK(m.counts[3] == 1);
    CHECK(m.counts[2] == 1);
}

TEST_CASE("property: counts and mass are conserved on random clouds") {
    oracle::Gen g(1);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = g.integer(1, 3);
        const std::size_t n = static_cast<std::size_t>(g.integer(1, 3000));
        const int m = g.integer(1, 12);
        const auto c = oracle::random_cloud(g, n, d, g.coin(0.3));
        const auto b = bin_measure(c, 1.0 / m);
        CHECK(std::accumulate(b.counts.begin(), b.counts.end(), std::uint64_t{0}) == n);
        CHECK(std::abs(b.total_mass() - 1.0) <= 1e-12);
        for (double v : b.density) CHECK(v >= 0.0);
        // independent histogram
        std::vector<std::uint64_t> h(b.counts.size(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t idx = 0, stride = 1;
            for (int a = 0; a < d; ++a) {
                const auto cell = std::min<std::size_t>(static_cast<std::size_t>(c.coord(i, a) * m), m - 1);
                idx += cell * stride;
                stride *= static_cast<std::size_t>(m);
            }
            ++h[idx];
        }
        CHECK(h == b.counts);
    }
}

TEST_CASE("ten thousand samples on a 10x10 grid obey the Bernstein union bound") {
    // Bernstein per box with variance p(1-p) and increments bounded by 1, union over 100 boxes:
    // P(max |density - 1| >= t) <= 200 exp(-n p t^2 / (2 (1 - p) + 2 t / 3)), below 0.01 at t = 0.5
    const double n = 1e4, p = 0.01, t = 0.5;
    CHECK(200.0 * std::exp(-n * p * t * t / (2 * (1 - p) + 2 * t / 3)) < 0.01);
    int within = 0, within_02 = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        oracle::Gen g(seed);
        const auto b = bin_measure(oracle::random_cloud(g, 10000, 2), 0.1);
        within += b.sup_deviation() < t;
        within_02 += b.sup_deviation() < 0.2;
    }
    CHECK(within >= 99);
    // each box density has standard deviation ~0.1, so a 0.2 bound on the maximum over 100 boxes is rare
    CHECK(within_02 < 10);
}

TEST_CASE("binning is identical for every thread count") {
    oracle::Gen g(3);
    const auto c = oracle::random_cloud(g, 50000, 2);
    set_num_threads(1);
    const auto a = bin_measure(c, 0.05);
    set_num_threads(4);
    const auto b = bin_measure(c, 0.05);
    set_num_threads(0);
    CHECK(a.counts == b.counts);
}

TEST_CASE("box side formula") {
    for (std::size_t n : {1000u, 10000u, 100000u, 1000000u}) {
        const double b = std::sqrt(std::log(static_cast<double>(n)));
        const double m = std::floor(std::sqrt(n / (b * std::log(static_cast<double>(n)))));
        CHECK(binning_delta(n, 2, 0.5) == doctest::Approx(1.0 / m).epsilon(1e-15));
    }
    CHECK(binning_delta(3, 2, 0.5) == 1.0);
    CHECK_THROWS_AS(binning_delta(2, 2, 0.5), ValidationError);
}

TEST_CASE("deviation table fields and shrinking transport ratio") {
    const std::vector<std::size_t> ns{1000, 10000, 100000};
    const auto rows = density_deviation_curve(ns, 7);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].n == ns[i]);
        CHECK(rows[i].delta == binning_delta(ns[i], 2, 0.5));
        CHECK(rows[i].ell == doctest::Approx(std::sqrt(2.0) * rows[i].delta));
        CHECK(rows[i].eps == doctest::Approx(0.7 * std::pow(ns[i], -0.25)));
        CHECK(rows[i].ell_over_eps == doctest::Approx(rows[i].ell / rows[i].eps));
        if (i > 0) CHECK(rows[i].ell_over_eps < rows[i - 1].ell_over_eps);
    }
    std::ostringstream os;
    write_deviation_csv(os, rows);
    CHECK(os.str().rfind("n,delta,m,sup_dev,ell,eps,ell_over_eps,seed\n", 0) == 0);
}

TEST_CASE("dyadic grid and spike") {
    const auto grid = dyadic_grid(2, 3);
    CHECK(grid.size() == 64);
    CHECK(grid.coord(0, 0) == doctest::Approx(-0.375));
    const auto u = dyadic_spike(3, 3);
    const double r = std::pow(2.0, -1.5);
    const double height = 1.0 / (omega_ball_volume(3) * r * r * r);
    const auto g3 = dyadic_grid(3, 3);
    for (std::size_t i = 0; i < g3.size(); ++i) {
        double s = 0.0;
        for (int a = 0; a < 3; ++a) s += g3.coord(i, a) * g3.coord(i, a);
        CHECK(u[i] == (s < r * r ? doctest::Approx(height) : doctest::Approx(0.0)));
    }
}

TEST_CASE("dyadic counterexample bounds for k = 3, 4, 5 in three dimensions") {
    const double wd = omega_ball_volume(3);
    for (int k = 3; k <= 5; ++k) {
        const auto r = dyadic_counterexample(k, 0.75, 3);
        CHECK(r.n == (std::size_t{1} << (3 * k)));
        CHECK(r.l1 >= 0.125);
        CHECK(r.l1 <= 8.0);
        const double scale = wd * std::pow(2.0, 1.5 * k);
        CHECK(r.ball_count >= 0.125 * scale);
        CHECK(r.ball_count <= 8.0 * scale);
        CHECK(r.max_u == doctest::Approx(std::pow(2.0, 1.5 * k) / wd));
        CHECK(r.l1 == doctest::Approx(r.ball_count * r.max_u / r.n).epsilon(1e-14));
        CHECK(r.energy > 0.0);
    }
}

TEST_CASE("dyadic counterexample guards") {
    CHECK_THROWS_AS(dyadic_counterexample(3, 0.75, 2), ValidationError);
    CHECK_THROWS_AS(dyadic_counterexample(3, 0.5, 3), ValidationError);
    CHECK_THROWS_AS(dyadic_counterexample(3, 1.0, 3), ValidationError);
    CHECK_THROWS_AS(dyadic_counterexample(7, 0.75, 3), ValidationError);
    CHECK_THROWS_AS(dyadic_grid(10, 2), ValidationError);
}

TEST_CASE("counterexample JSON key order") {
    std::ostringstream os;
    write_counterexample_json(os, dyadic_counterexample(3, 0.75, 3));
    const auto text = os.str();
    CHECK(text.rfind("{\"k\":3,\"d\":3,\"l1\":", 0) == 0);
    CHECK(text.find("\"energy\"") < text.find("\"alpha\""));
    const auto j = nlohmann::json::parse(text);
    CHECK(j.at("k") == 3);
    CHECK(j.contains("max_u"));
}
