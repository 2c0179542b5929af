#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "conjtest/connecting_map.hpp"
#include "conjtest/embedding.hpp"
#include "conjtest/generators.hpp"

using namespace conjtest;

namespace {

// Fixed-step classical Runge-Kutta, independent of the library integrator.
std::vector<std::array<double, 3>> rk4_lorenz(std::array<double, 3> y, double dt, std::size_t substeps,
                                              std::size_t samples) {
    auto f = [](const std::array<double, 3>& p) {
        return std::array<double, 3>{10.0 * (p[1] - p[0]), p[0] * (28.0 - p[2]) - p[1], p[0] * p[1] - 8.0 / 3.0 * p[2]};
    };
    std::vector<std::array<double, 3>> out{y};
    const double h = dt / static_cast<double>(substeps);
    for (std::size_t s = 1; s < samples; ++s) {
        for (std::size_t i = 0; i < substeps; ++i) {
            auto k1 = f(y);
            std::array<double, 3> t;
            for (int c = 0; c < 3; ++c) t[c] = y[c] + 0.5 * h * k1[c];
            auto k2 = f(t);
            for (int c = 0; c < 3; ++c) t[c] = y[c] + 0.5 * h * k2[c];
            auto k3 = f(t);
            for (int c = 0; c < 3; ++c) t[c] = y[c] + h * k3[c];
            auto k4 = f(t);
            for (int c = 0; c < 3; ++c) y[c] += h / 6.0 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
        }
        out.push_back(y);
    }
    return out;
}

double sup_diff(const TimeSeries& a, const TimeSeries& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.coords().size(); ++i) m = std::max(m, std::fabs(a.coords()[i] - b.coords()[i]));
    return m;
}

}  // namespace

TEST_CASE("circle rotation") {
    CHECK(gen_circle(0.25, 1.0, 0.0, 4) == TimeSeries::scalar({0, 0.25, 0.5, 0.75}, MetricKind::circle));
    const auto s = gen_circle(0.25, 2.0, 0.0, 3);
    CHECK(s.value(0, 0) == 0.0);
    CHECK(s.value(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(s.value(2, 0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK_THROWS_AS(gen_circle(0.1, 0.0, 0.0, 3), Error);
    CHECK_THROWS_AS(gen_circle(0.1, 1.0, 0.0, 0), Error);

    const double alpha = std::sqrt(2.0) / 10.0;
    const auto nonlinear = gen_circle(alpha, 2.0, 0.3, 500);
    const auto rigid = gen_circle(alpha, 1.0, 0.09, 500);
    const auto mapped = ConnectingMap::parse("pow:2").image_of(nonlinear, MetricKind::circle);
    for (std::size_t i = 0; i < 500; ++i)
        CHECK(circle_distance(mapped.value(i, 0), rigid.value(i, 0)) < 1e-12);

    // rational angle p/q with exact binary representation is q-periodic
    const auto periodic = gen_circle(0.125, 1.0, 0.0, 17);
    CHECK(periodic.value(16, 0) == periodic.value(8, 0));
    CHECK(periodic.value(8, 0) == periodic.value(0, 0));
}

TEST_CASE("torus rotation") {
    CHECK(gen_torus(0.5, 0.5, {0, 0}, 3) == TimeSeries::from_points({{0, 0}, {0.5, 0.5}, {0, 0}}, MetricKind::torus));
    CHECK(gen_torus(0.0, 0.3, {0.1, 0}, 2) == TimeSeries::from_points({{0.1, 0}, {0.1, 0.3}}, MetricKind::torus));
    const double a = std::sqrt(2.0) / 10.0, b = std::sqrt(3.0) / 10.0;
    CHECK(project(gen_torus(a, b, {0.2, 0.7}, 300), 1) == gen_circle(a, 1.0, 0.2, 300));
}

TEST_CASE("interval maps") {
    CHECK(gen_interval_map(IntervalMap::logistic, 4.0, 0.5, 3) == TimeSeries::scalar({0.5, 1.0, 0.0}));
    const auto tent = gen_interval_map(IntervalMap::tent, 2.0, 0.3, 3);
    CHECK(tent.value(1, 0) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(tent.value(2, 0) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK_THROWS_AS(gen_interval_map(IntervalMap::logistic, 4.0, 1.5, 3), Error);
    CHECK_THROWS_AS(gen_interval_map(IntervalMap::logistic, 4.5, 0.5, 3), Error);
    CHECK_THROWS_AS(gen_interval_map(IntervalMap::tent, 2.5, 0.5, 3), Error);

    // h(f_4(x)) = g_2(h(x)) for h(x) = 2 asin(sqrt x) / pi
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto h = [](double x) { return 2.0 * std::asin(std::sqrt(x)) / std::numbers::pi; };
    for (int i = 0; i < 100; ++i) {
        const double x = u(rng);
        CHECK(std::fabs(h(4.0 * x * (1.0 - x)) - 2.0 * std::min(h(x), 1.0 - h(x))) < 1e-9);
    }
}

TEST_CASE("lorenz invariant sets") {
    const auto axis = gen_lorenz({0, 0, 5}, 200, 0);
    for (std::size_t i = 0; i < axis.size(); ++i) {
        CHECK(axis.value(i, 0) == 0.0);
        CHECK(axis.value(i, 1) == 0.0);
    }
    const double t = 199 * 0.02;
    CHECK(axis.value(199, 2) == doctest::Approx(5.0 * std::exp(-8.0 / 3.0 * t)).epsilon(1e-6));
    const auto rest = gen_lorenz({0, 0, 0}, 50, 10);
    for (double v : rest.coords()) CHECK(v == 0.0);
}

TEST_CASE("lorenz attractor bounding box") {
    const auto l = gen_lorenz({1, 1, 1}, 10000, 2000);
    CHECK(l.size() == 10000);
    CHECK(l.metric() == MetricKind::euclidean);
    for (std::size_t i = 0; i < l.size(); ++i) {
        CHECK(std::fabs(l.value(i, 0)) <= 25.0);
        CHECK(std::fabs(l.value(i, 1)) <= 30.0);
        CHECK(l.value(i, 2) >= 0.0);
        CHECK(l.value(i, 2) <= 55.0);
    }
    // first kept sample is sample 2000 of the full run
    const auto full = gen_lorenz({1, 1, 1}, 2001, 0);
    CHECK(full.value(2000, 0) == l.value(0, 0));
}

TEST_CASE("lorenz dense output agrees with an independent integrator") {
    const std::size_t samples = 250;  // five time units
    const auto ref = rk4_lorenz({1, 1, 1}, 0.02, 200, samples);
    const auto l = gen_lorenz({1, 1, 1}, samples, 0);
    double worst = 0.0;
    for (std::size_t i = 0; i < samples; ++i)
        for (int c = 0; c < 3; ++c) worst = std::max(worst, std::fabs(l.value(i, c) - ref[i][c]));
    CHECK(worst < 1e-5);
}

TEST_CASE("lorenz tolerance halving") {
    LorenzParams half;
    half.rtol /= 2;
    half.atol /= 2;
    const std::size_t samples = 500;  // ten time units; chaos amplifies beyond
    CHECK(sup_diff(gen_lorenz({1, 1, 1}, samples, 0), gen_lorenz({1, 1, 1}, samples, 0, half)) < 1e-4);
    LorenzParams bad;
    bad.sample_time = 0.0;
    CHECK_THROWS_AS(gen_lorenz({1, 1, 1}, 10, 0, bad), Error);
    LorenzParams few;
    few.max_steps = 10;
    CHECK_THROWS_AS(gen_lorenz({1, 1, 1}, 1000, 0, few), Error);
}

TEST_CASE("klein bottle") {
    const auto p = klein_point(0, 0);
    CHECK(p == Point{1, 0, 8, 0});
    const auto k = gen_klein(std::numbers::pi, 0, {0, 0}, 2);
    CHECK(k.value(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::fabs(k.value(1, 0)) < 1e-12);
    CHECK(k.value(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.value(1, 2) == doctest::Approx(-8.0).epsilon(1e-12));
    CHECK(std::fabs(k.value(1, 3)) < 1e-12);
    const auto still = gen_klein(2 * std::numbers::pi, 2 * std::numbers::pi, {0.4, 1.1}, 5);
    for (std::size_t i = 1; i < 5; ++i)
        for (std::size_t c = 0; c < 4; ++c) CHECK(still.value(i, c) == doctest::Approx(still.value(0, c)).epsilon(1e-12));
    const double a = std::sqrt(2.0) / 10.0, b = std::sqrt(3.0) / 10.0;
    CHECK(gen_klein(a, b, {0, 0}, 100) == gen_klein(a, b, {0, 0}, 100));
}

TEST_CASE("noise") {
    const auto s = gen_circle(0.1, 1.0, 0.0, 400);
    CHECK(add_noise(s, 0.0, 3) == s);
    CHECK(add_noise(s, 0.05, 3) == add_noise(s, 0.05, 3));
    CHECK_FALSE(add_noise(s, 0.05, 3) == add_noise(s, 0.05, 4));
    const auto n = add_noise(s, 0.05, 3);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(n.value(i, 0) >= 0.0);
        CHECK(n.value(i, 0) < 1.0);
        CHECK(circle_distance(n.value(i, 0), s.value(i, 0)) <= 0.05 + 1e-15);
    }
    CHECK_THROWS_AS(add_noise(s, -0.1, 1), Error);
    const auto flat = add_noise(TimeSeries::scalar(std::vector<double>(1000, 0.0)), 1.0, 9);
    double lo = 1, hi = -1, mean = 0;
    for (double v : flat.coords()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        mean += v / 1000.0;
    }
    CHECK(lo >= -1.0);
    CHECK(hi <= 1.0);
    CHECK(std::fabs(mean) < 0.1);
    CounterRng rng(5);
    const auto first = rng.next();
    CHECK(CounterRng(5).at(0) == first);
}
