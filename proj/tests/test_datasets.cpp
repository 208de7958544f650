#include "doctest.h"
#include "oracles.hpp"

#include "gms/datasets.hpp"
#include "gms/parallel.hpp"

#include <cmath>
#include <sstream>

using namespace gms;

TEST_CASE("noise-free labels equal the truth") {
    const auto s = generate_synthetic(2000, 0.0, 5);
    CHECK(s.cloud.size() == 2000);
    CHECK(s.cloud.dim() == 2);
    for (std::size_t i = 0; i < 2000; ++i) {
        CHECK(s.cloud.labels()[i] == s.truth[i]);
        const double x = s.cloud.coord(i, 0), y = s.cloud.coord(i, 1);
        CHECK(s.truth[i] == SyntheticTruth::value(x, y));
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        CHECK(y >= 0.0);
        CHECK(y < 1.0);
    }
}

TEST_CASE("noise has zero mean and the requested spread") {
    const std::size_t n = 1000000;
    const auto s = generate_synthetic(n, 0.2, 11);
    long double sum = 0.0L, sq = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = s.cloud.labels()[i] - s.truth[i];
        sum += e;
        sq += static_cast<long double>(e) * e;
    }
    const double mean = static_cast<double>(sum / n);
    const double sd = std::sqrt(static_cast<double>(sq / n) - mean * mean);
    CHECK(std::abs(mean) <= 3.0 * sd / std::sqrt(static_cast<double>(n)));
    CHECK(sd == doctest::Approx(0.2).epsilon(0.005));
}

TEST_CASE("generation is bit-reproducible across runs and thread counts") {
    set_num_threads(1);
    const auto a = generate_synthetic(5000, 0.2, 1);
    set_num_threads(4);
    const auto b = generate_synthetic(5000, 0.2, 1);
    set_num_threads(0);
    CHECK(a.cloud.coords() == b.cloud.coords());
    CHECK(a.cloud.labels() == b.cloud.labels());
    const auto c = generate_synthetic(5000, 0.2, 2);
    CHECK(a.cloud.coords() != c.cloud.coords());
    // a prefix of a larger sample is the smaller sample
    const auto d = generate_synthetic(6000, 0.2, 1);
    CHECK(std::equal(a.cloud.labels().begin(), a.cloud.labels().end(), d.cloud.labels().begin()));
}

TEST_CASE("reference truth layout") {
    CHECK(SyntheticTruth::piece(0.5, 0.1) == 0);
    CHECK(SyntheticTruth::piece(0.2, 0.8) == 1);
    CHECK(SyntheticTruth::piece(0.8, 0.8) == 2);
    CHECK(SyntheticTruth::jump_distance(0.5, 0.33 - 0.045) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(SyntheticTruth::jump_distance(0.45 + 0.08 * 0.7, 0.7) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(SyntheticTruth::value(0.5, 0.15) == doctest::Approx(0.1));
    CHECK(SyntheticTruth::value(0.25, 0.65) == doctest::Approx(0.9));
    CHECK(SyntheticTruth::value(0.75, 0.65) == doctest::Approx(0.5));
    // every crossing of a segment changes the value
    oracle::Gen g(1);
    for (int t = 0; t < 2000; ++t) {
        const double x = g.uniform(), y = g.uniform();
        const double v = SyntheticTruth::value(x, y);
        CHECK(v == SyntheticTruth::plane(SyntheticTruth::piece(x, y), x, y));
        if (SyntheticTruth::jump_distance(x, y) > 0.05) {
            const int s = SyntheticTruth::jump_side(x, y);
            CHECK((s == 1 || s == -1));
        }
    }
}

TEST_CASE("l1 error") {
    const std::vector<double> a{1.0, 2.0, 3.0}, b{1.5, 2.5, 3.5};
    CHECK(l1_error(a, a) == 0.0);
    CHECK(l1_error(a, b) == doctest::Approx(0.5));
    CHECK_THROWS_AS(l1_error(a, std::vector<double>{1.0}), ValidationError);
    CHECK_THROWS_AS(l1_error(std::vector<double>{}, std::vector<double>{}), ValidationError);
    oracle::Gen g(2);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = static_cast<std::size_t>(g.integer(1, 100));
        const auto x = oracle::random_vector(g, n), y = oracle::random_vector(g, n), z = oracle::random_vector(g, n);
        CHECK(l1_error(x, z) <= l1_error(x, y) + l1_error(y, z) + 1e-15);
    }
}

TEST_CASE("housing ingestion filters and normalizes") {
    std::istringstream csv("id,date,price,bedrooms,sqft_living,lat,long\n"
                           "1,x,500000,3,1000,47.5,-122.2\n"
                           "2,x,300000,2,,47.6,-122.3\n"
                           "3,x,400000,2,0,47.6,-122.3\n"
                           "4,x,900000,4,1500,47.7,-121.0\n"
                           "5,x,250000,1,1000,47.4,-122.0\n");
    const auto h = ingest_housing(csv);
    CHECK(h.rows_read == 5);
    CHECK(h.dropped_sqft == 2);
    CHECK(h.dropped_longitude == 1);
    REQUIRE(h.cloud.size() == 2);
    CHECK(h.max_price_per_sqft == doctest::Approx(500.0));
    CHECK(h.cloud.labels()[0] == 1.0);
    CHECK(h.cloud.labels()[1] == doctest::Approx(0.5));
    CHECK(h.cloud.coord(0, 0) == -122.2);
    CHECK(h.cloud.coord(0, 1) == 47.5);
    for (double v : h.cloud.labels()) {
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("housing raw labels and rescale") {
    const std::string text = "longitude,latitude,price,sqft\n-122.0,47.0,100,2\n-122.5,48.0,300,3\n";
    std::istringstream a(text), b(text);
    HousingOptions raw;
    raw.normalize = false;
    const auto h = ingest_housing(a, raw);
    CHECK(h.cloud.labels()[0] == 50.0);
    CHECK(h.cloud.labels()[1] == 100.0);
    HousingOptions scaled;
    scaled.rescale = true;
    const auto s = ingest_housing(b, scaled);
    const double c = std::cos(47.5 * std::numbers::pi / 180.0);
    CHECK(s.cloud.coord(0, 0) == doctest::Approx(0.5 * c));
    CHECK(s.cloud.coord(1, 0) == doctest::Approx(0.0));
    CHECK(s.cloud.coord(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("housing errors") {
    std::istringstream bad("price,sqft_living,lat,long\n100,2,47,-122\n100,abc,47,-122\n");
    try {
        ingest_housing(bad);
        FAIL("expected an error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::istringstream empty("price,sqft_living,lat,long\n100,2,47,-100\n");
    CHECK_THROWS_AS(ingest_housing(empty), ValidationError);
    std::istringstream missing("price,lat,long\n100,47,-122\n");
    CHECK_THROWS_AS(ingest_housing(missing), ValidationError);
    CHECK_THROWS_AS(ingest_housing(std::string("/nonexistent/housing.csv")), ValidationError);
}

TEST_CASE("csv round trips") {
    const auto s = generate_synthetic(100, 0.2, 3);
    std::stringstream ss;
    write_point_csv(ss, s.cloud);
    CHECK(ss.str().rfind("x0,x1,f\n", 0) == 0);
    const auto back = read_point_csv(ss);
    CHECK(back.coords() == s.cloud.coords());
    CHECK(back.labels() == s.cloud.labels());

    std::stringstream col;
    write_column_csv(col, "u", s.truth);
    CHECK(col.str().rfind("u\n", 0) == 0);
    CHECK(read_column_csv(col) == s.truth);

    CHECK(split_csv_line("a,\"b,c\",d") == std::vector<std::string>{"a", "b,c", "d"});
    std::istringstream ragged("x0,x1,f\n0.1,0.2\n");
    CHECK_THROWS_AS(read_point_csv(ragged), ValidationError);
}
