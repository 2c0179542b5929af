#pragma once

// Exhaustive reference implementations used only by tests. They share no
// code with the library beyond TimeSeries storage and the metric.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

#include "conjtest/core.hpp"

namespace oracle {

using conjtest::TimeSeries;

inline double dist(const TimeSeries& s, std::size_t i, std::size_t j) { return s.distance(i, j); }

// rank[i][j] = position (1-based) of j among all points != i, sorted by
// (distance to i, index); rank[i][i] = 0.
inline std::vector<std::vector<std::size_t>> rank_table(const TimeSeries& s) {
    const std::size_t n = s.size();
    std::vector<std::vector<std::size_t>> rank(n, std::vector<std::size_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> order;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) order.push_back(j);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return dist(s, i, x) < dist(s, i, y); });
        for (std::size_t p = 0; p < order.size(); ++p) rank[i][order[p]] = p + 1;
    }
    return rank;
}

// Minimal e with the first k A-neighbors contained in the first e+k
// B-neighbors, searched by increasing e.
inline double knn(const TimeSeries& a, const TimeSeries& b, std::size_t k) {
    const std::size_t n = a.size();
    const auto ra = rank_table(a), rb = rank_table(b);
    std::size_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t e = 0;; ++e) {
            bool covered = true;
            for (std::size_t j = 0; j < n && covered; ++j)
                if (j != i && ra[i][j] <= k && rb[i][j] > e + k) covered = false;
            if (covered) {
                total += e;
                break;
            }
        }
    }
    return static_cast<double>(total) / static_cast<double>(n * n);
}

inline double total_std(const TimeSeries& s) {
    double var = 0.0;
    for (std::size_t c = 0; c < s.dim(); ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) mean += s.value(i, c);
        mean /= static_cast<double>(s.size());
        double v = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) v += (s.value(i, c) - mean) * (s.value(i, c) - mean);
        var += v / static_cast<double>(s.size());
    }
    return std::sqrt(var);
}

// Returns -1 when no pair is admissible.
inline double fnn(const TimeSeries& a, const TimeSeries& b, double r) {
    const auto ra = rank_table(a);
    const double sigma = total_std(a);
    std::size_t num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::size_t nn = 0;
        for (std::size_t j = 0; j < a.size(); ++j)
            if (ra[i][j] == 1) nn = j;
        const double da = dist(a, i, nn), db = dist(b, i, nn);
        if (!(sigma / r - da > 0.0)) continue;
        ++den;
        if (da > 0.0 ? db / da - r > 0.0 : db > 0.0) ++num;
    }
    return den == 0 ? -1.0 : static_cast<double>(num) / static_cast<double>(den);
}

// Random series helpers shared by the test files.
inline TimeSeries random_series(std::mt19937_64& rng, std::size_t n, conjtest::MetricKind kind, std::size_t dim,
                                double scale = 1.0, bool with_duplicates = false) {
    std::uniform_real_distribution<double> u(0.0, scale);
    std::vector<double> xs(n * dim);
    for (double& x : xs) x = u(rng);
    if (with_duplicates && n > 3) {
        for (std::size_t c = 0; c < dim; ++c) xs[dim * (n - 1) + c] = xs[c];
        for (std::size_t c = 0; c < dim; ++c) xs[dim * (n - 2) + c] = xs[dim + c];
    }
    return TimeSeries(dim, kind, std::move(xs));
}

// Integer-valued coordinates produce many exact distance ties.
inline TimeSeries random_grid_series(std::mt19937_64& rng, std::size_t n, conjtest::MetricKind kind,
                                     std::size_t dim, int levels) {
    std::uniform_int_distribution<int> u(0, levels - 1);
    std::vector<double> xs(n * dim);
    const bool wrapped = conjtest::is_wrapped(kind);
    for (double& x : xs) x = wrapped ? u(rng) / static_cast<double>(levels) : u(rng);
    return TimeSeries(dim, kind, std::move(xs));
}

}  // namespace oracle
