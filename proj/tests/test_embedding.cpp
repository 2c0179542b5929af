#include <doctest.h>

#include "conjtest/embedding.hpp"

using namespace conjtest;

TEST_CASE("takens windows") {
    const auto s = TimeSeries::scalar({1, 2, 3, 4, 5});
    const auto e = takens_embed(s, {2, 1});
    CHECK(e == TimeSeries::from_points({{1, 2}, {2, 3}, {3, 4}, {4, 5}}, MetricKind::maximum));
    CHECK(takens_embed(s, {1, 3}) == s.with_metric(MetricKind::maximum));

    std::vector<double> v(11);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i + 1);
    const auto one = takens_embed(TimeSeries::scalar(v), {3, 5});
    CHECK(one == TimeSeries::from_points({{1, 6, 11}}, MetricKind::maximum));
    CHECK_THROWS_AS(takens_embed(TimeSeries::scalar(v), {3, 6}), Error);
    CHECK_THROWS_AS(takens_embed(s, {0, 1}), Error);
    CHECK_THROWS_AS(takens_embed(s, {2, 0}), Error);
    CHECK_THROWS_AS(takens_embed(TimeSeries::from_points({{1, 2}}, MetricKind::euclidean), {1, 1}), Error);
}

TEST_CASE("takens length, metric and prefix property") {
    std::vector<double> v;
    for (int i = 0; i < 100; ++i) v.push_back(std::sin(0.3 * i));
    const auto s = TimeSeries::scalar(v);
    for (std::size_t d = 1; d <= 5; ++d)
        for (std::size_t l = 1; l <= 4; ++l) {
            const auto e = takens_embed(s, {d, l});
            CHECK(e.size() == s.size() - (d - 1) * l);
            CHECK(e.metric() == MetricKind::maximum);
            const auto p = project(e, 1);
            for (std::size_t i = 0; i < p.size(); ++i) CHECK(p.value(i, 0) == s.value(i, 0));
        }
    CHECK(takens_embed(s, {2, 1}, MetricKind::euclidean).metric() == MetricKind::euclidean);
    const auto flat = takens_embed(TimeSeries::scalar(std::vector<double>(20, 3.0)), {3, 2});
    CHECK(diam(flat) == 0.0);
}

TEST_CASE("embedding metric") {
    const auto c = TimeSeries::scalar({0.1, 0.5, 0.9}, MetricKind::circle);
    CHECK(takens_embed(c, {2, 1}).metric() == MetricKind::maximum);
    CHECK(takens_embed(c, {2, 1}, MetricKind::circle).metric() == MetricKind::torus);
    CHECK(takens_embed(c, {1, 1}, MetricKind::circle).metric() == MetricKind::circle);
    CHECK(takens_embed(c, {2, 1}, MetricKind::euclidean).metric() == MetricKind::euclidean);
}

TEST_CASE("project") {
    const auto a = TimeSeries::from_points({{1, 2}, {3, 4}}, MetricKind::maximum);
    CHECK(project(a, 1) == TimeSeries::scalar({1, 3}));
    CHECK(project(a, 2) == TimeSeries::scalar({2, 4}));
    CHECK_THROWS_AS(project(a, 0), Error);
    CHECK_THROWS_AS(project(a, 3), Error);
    CHECK(takens_embed(project(a, 1), {1, 1}).coords() == project(a, 1).coords());
    const auto t = TimeSeries::from_points({{0.25, 0.5}}, MetricKind::torus);
    CHECK(project(t, 2).metric() == MetricKind::circle);
}

TEST_CASE("observable_mean and truncate") {
    CHECK(observable_mean(TimeSeries::from_points({{0, 0, 0, 0}}, MetricKind::euclidean)) == TimeSeries::scalar({0}));
    CHECK(observable_mean(TimeSeries::from_points({{1, 2, 3, 4}}, MetricKind::euclidean)) == TimeSeries::scalar({2.5}));
    CHECK(observable_mean(TimeSeries::from_points({{1, 1}, {2, 4}}, MetricKind::euclidean)) ==
          TimeSeries::scalar({1, 3}));
    const auto s = TimeSeries::scalar({1, 2, 3});
    CHECK(truncate(s, 2) == TimeSeries::scalar({1, 2}));
    CHECK_THROWS_AS(truncate(s, 0), Error);
    CHECK_THROWS_AS(truncate(s, 4), Error);
}
