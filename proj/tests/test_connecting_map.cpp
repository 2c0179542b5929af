#include <doctest.h>

#include <cmath>

#include "conjtest/connecting_map.hpp"

using namespace conjtest;

TEST_CASE("analytic maps") {
    const auto s = TimeSeries::scalar({0.25, 0.5}, MetricKind::circle);
    CHECK(ConnectingMap::parse("identity").image_of(s, MetricKind::circle) == s);
    CHECK(ConnectingMap::parse("pow:2").image_of(s, MetricKind::circle) ==
          TimeSeries::scalar({0.0625, 0.25}, MetricKind::circle));
    const auto x = TimeSeries::scalar({0.0, 0.5, 1.0});
    const auto y = ConnectingMap::parse("arcsin").image_of(x, MetricKind::euclidean);
    CHECK(y.value(0, 0) == 0.0);
    CHECK(y.value(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(y.value(2, 0) == 1.0);
    const auto back = ConnectingMap::parse("sinsq").image_of(y, MetricKind::euclidean);
    for (std::size_t i = 0; i < 3; ++i) CHECK(back.value(i, 0) == doctest::Approx(x.value(i, 0)).epsilon(1e-15));
    CHECK_THROWS_AS(ConnectingMap::parse("arcsin").image_of(TimeSeries::scalar({1.5}), MetricKind::euclidean), Error);
}

TEST_CASE("projection and padding") {
    const auto t = TimeSeries::from_points({{0.1, 0.7}, {0.3, 0.9}}, MetricKind::torus);
    const auto p = ConnectingMap::parse("proj:1").image_of(t, MetricKind::circle);
    CHECK(p == TimeSeries::scalar({0.1, 0.3}, MetricKind::circle));
    const auto q = ConnectingMap::parse("pad:2").image_of(p, MetricKind::torus);
    CHECK(q == TimeSeries::from_points({{0.1, 0}, {0.3, 0}}, MetricKind::torus));
    CHECK_THROWS_AS(ConnectingMap::parse("proj:3").image_of(t, MetricKind::circle), Error);
}

TEST_CASE("index paired maps") {
    const auto image = TimeSeries::scalar({7, 8, 9});
    const auto h = ConnectingMap::index_paired(image);
    CHECK(h.is_index_paired());
    CHECK(h.image_of(TimeSeries::scalar({0, 1, 2}), MetricKind::euclidean) == image);
    CHECK_THROWS_AS(h.image_of(TimeSeries::scalar({0, 1}), MetricKind::euclidean), Error);
}

TEST_CASE("parse errors") {
    for (const char* bad : {"", "pow", "pow:x", "pow:-1", "proj:0", "pad:0", "paired", "warp"})
        CHECK_THROWS_AS(ConnectingMap::parse(bad), Error);
    CHECK(ConnectingMap::parse("id").name() == "identity");
}
