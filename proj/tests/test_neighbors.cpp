#include <doctest.h>

#include <random>

#include "conjtest/neighbors.hpp"
#include "oracles.hpp"

using namespace conjtest;

namespace {
std::vector<std::size_t> idx(const NeighborQueryResult& r) { return r.indices; }
}  // namespace

TEST_CASE("knn is self-inclusive") {
    const auto a = TimeSeries::scalar({0.3, 0.9, 0.1});
    const auto r = knn(a[0], 1, a);
    CHECK(idx(r) == std::vector<std::size_t>{0});
    CHECK(r.distances[0] == 0.0);
    CHECK(idx(knn(a[0], 3, a)) == std::vector<std::size_t>{0, 2, 1});
    CHECK_THROWS_AS(knn(a[0], 4, a), Error);
    CHECK_THROWS_AS(knn(a[0], 0, a), Error);
}

TEST_CASE("knn on the circle wraps") {
    const auto a = TimeSeries::scalar({0, 0.4, 0.6}, MetricKind::circle);
    const std::vector<double> q{0.95};
    const auto r = knn(q, 1, a);
    CHECK(idx(r) == std::vector<std::size_t>{0});
    CHECK(r.distances[0] == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("knn_excl") {
    const auto a = TimeSeries::scalar({0, 1, 2.1});
    CHECK(idx(knn_excl(0, 1, a)) == std::vector<std::size_t>{1});
    CHECK(idx(knn_excl(2, 2, a)) == std::vector<std::size_t>{1, 0});
    CHECK(idx(knn_excl(1, 2, a)) == std::vector<std::size_t>{0, 2});
    CHECK_THROWS_AS(knn_excl(0, 3, a), Error);
    std::mt19937_64 rng(2);
    const auto s = oracle::random_series(rng, 200, MetricKind::euclidean, 2);
    for (std::size_t i = 0; i < s.size(); i += 7)
        for (std::size_t j : idx(knn_excl(i, 10, s))) CHECK(j != i);
}

TEST_CASE("ties are broken by index") {
    const auto a = TimeSeries::scalar({1, 0, 2, 1, 0});
    const std::vector<double> q{1};
    CHECK(idx(knn(q, 5, a)) == std::vector<std::size_t>{0, 3, 1, 2, 4});
    CHECK(idx(knn(q, 3, a, 4)) == std::vector<std::size_t>{0, 3, 1});
    CHECK(idx(knn_excl(0, 2, a)) == std::vector<std::size_t>{3, 1});
}

TEST_CASE("restricted pool") {
    const auto a = TimeSeries::scalar({0, 5, 1, 0.5});
    const std::vector<double> q{0.6};
    CHECK(idx(knn(q, 1, a, 3)) == std::vector<std::size_t>{2});
    CHECK(idx(knn(q, 1, a)) == std::vector<std::size_t>{3});
    CHECK_THROWS_AS(knn(q, 4, a, 3), Error);
}

TEST_CASE("ball returns the smallest neighborhood containing a key") {
    const auto a = TimeSeries::scalar({1, 0, 2, 1, 0, 3});
    const NeighborIndex index(a);
    const std::vector<double> q{1};
    CHECK(index.ball(q, 1.0, 1) == std::vector<std::size_t>{0, 1, 3});
    CHECK(index.ball(q, 1.0, 2) == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(index.ball(q, 0.0, 0) == std::vector<std::size_t>{0});
    std::mt19937_64 rng(9);
    for (MetricKind kind : {MetricKind::euclidean, MetricKind::maximum, MetricKind::torus}) {
        const auto s = oracle::random_grid_series(rng, 300, kind, 2, 6);
        const NeighborIndex ix(s, 250);
        for (std::size_t i = 0; i < 40; ++i) {
            const auto r = ix.knn(s[i], 12);
            const auto b = ix.ball(s[i], r.distances.back(), r.indices.back());
            auto sorted = r.indices;
            std::sort(sorted.begin(), sorted.end());
            CHECK(b == sorted);
        }
    }
}

TEST_CASE("hausdorff examples") {
    const auto z = TimeSeries::scalar({0}), one = TimeSeries::scalar({1});
    CHECK(hausdorff(MetricKind::euclidean, z, one) == 1.0);
    const auto s1 = TimeSeries::scalar({0, 1}), s2 = TimeSeries::scalar({0, 2});
    CHECK(hausdorff(MetricKind::euclidean, s1, s2) == 1.0);
    CHECK(hausdorff(MetricKind::euclidean, s1, s1) == 0.0);
    const auto dup = TimeSeries::scalar({1, 0, 1});
    CHECK(hausdorff(MetricKind::euclidean, s1, dup) == 0.0);
    const std::vector<std::size_t> none;
    const std::vector<std::size_t> first{0};
    CHECK_THROWS_AS(hausdorff(s1, none, s2, first), Error);
}

TEST_CASE("hausdorff properties") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<std::size_t> size(1, 8);
    for (MetricKind kind : {MetricKind::euclidean, MetricKind::maximum, MetricKind::circle, MetricKind::torus}) {
        const std::size_t dim = kind == MetricKind::circle ? 1 : 2;
        for (int trial = 0; trial < 200; ++trial) {
            const auto x = oracle::random_series(rng, size(rng), kind, dim);
            const auto y = oracle::random_series(rng, size(rng), kind, dim);
            const auto w = oracle::random_series(rng, size(rng), kind, dim);
            const double xy = hausdorff(kind, x, y);
            CHECK(xy == hausdorff(kind, y, x));
            CHECK(hausdorff(kind, x, w) <= xy + hausdorff(kind, y, w) + 1e-12);
            CHECK(hausdorff(kind, x, x) == 0.0);
        }
    }
}

TEST_CASE("k-d tree matches brute force") {
    std::mt19937_64 rng(4);
    for (MetricKind kind : {MetricKind::euclidean, MetricKind::maximum}) {
        for (std::size_t dim : {1, 2, 3, 5}) {
            const auto s = oracle::random_series(rng, 700, kind, dim, 1.0, true);
            const auto report = validate_index(s, 150, dim);
            CHECK(report.accelerated);
            CHECK_MESSAGE(report.passed(), report.first_failure);
            const auto g = oracle::random_grid_series(rng, 500, kind, dim, 4);
            const auto grid_report = validate_index(g, 150, dim + 10);
            CHECK_MESSAGE(grid_report.passed(), grid_report.first_failure);
        }
    }
    const auto circle = oracle::random_series(rng, 100, MetricKind::circle, 1);
    CHECK_FALSE(validate_index(circle, 10).accelerated);
    CHECK(validate_index(circle, 0).passed());
}
