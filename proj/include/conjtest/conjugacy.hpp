#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "conjtest/connecting_map.hpp"
#include "conjtest/core.hpp"

namespace conjtest {

enum class Method { fnn, knn, conjtest, conjtest_plus };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

/// Knobs of the four tests: r is the FNN threshold, k the neighborhood size,
/// t the time horizon of the conjtest variants. Each test reads only its own.
struct TestParams {
    double r = 2.0;
    std::size_t k = 5;
    std::size_t t = 5;
};

/// One directed evaluation. `count` is the number of admissible pairs (FNN),
/// the number of points (KNN), or the number of evaluated indices (conjtest).
struct DirectedValue {
    double value = 0.0;
    std::size_t count = 0;
};

/// Both directions of one method, mirroring how results are tabulated.
struct TestResult {
    Method method = Method::fnn;
    TestParams params;
    DirectedValue ab;
    DirectedValue ba;
};

/// Worker threads used by the per-index loops; 0 means hardware concurrency.
/// The reductions are fixed-order, so results do not depend on this.
void set_worker_threads(unsigned threads);
unsigned worker_threads();

/// Directed generalized false-nearest-neighbor ratio between index-paired
/// series of equal length. Throws when no point passes the sigma/r filter.
DirectedValue fnn_test_detail(const TimeSeries& a, const TimeSeries& b, double r);
double fnn_test(const TimeSeries& a, const TimeSeries& b, double r);

/// Classical FNN statistic for embedding dimension `d` of a scalar series:
/// compares the d- and (d+1)-dimensional delay embeddings (lag `lag`),
/// truncated to a common length.
double fnn_dim(const TimeSeries& scalar, double r, std::size_t d, std::size_t lag);

/// Directed KNN statistic: for every point, how many extra neighbors of the
/// paired point are needed to cover the image of its k-neighborhood,
/// summed and divided by n^2.
DirectedValue knn_test_detail(const TimeSeries& a, const TimeSeries& b, std::size_t k);
double knn_test(const TimeSeries& a, const TimeSeries& b, std::size_t k);

/// Directed conjtest: how far the k-neighborhoods of A, pushed t steps
/// forward and mapped by h, are from their nearest-sample images in B pushed
/// t steps forward, averaged over evaluated points and scaled by diam(B).
///
/// f^t and g^t are index shifts, so only points with t successors are used:
/// indices below n-t are evaluated, and neighbor pools in A and in B are
/// clipped to indices below n-t and m-t respectively.
DirectedValue conjtest_detail(const TimeSeries& a, const TimeSeries& b, std::size_t k,
                              std::size_t t, const ConnectingMap& h);
double conjtest(const TimeSeries& a, const TimeSeries& b, std::size_t k, std::size_t t,
                const ConnectingMap& h);

/// conjtest with the enriched image neighborhood: the image set is grown to
/// the smallest k_i-nearest neighborhood of h(a_i) in B that contains the
/// nearest-sample images of the whole k-neighborhood.
DirectedValue conjtest_plus_detail(const TimeSeries& a, const TimeSeries& b, std::size_t k,
                                   std::size_t t, const ConnectingMap& h);
double conjtest_plus(const TimeSeries& a, const TimeSeries& b, std::size_t k, std::size_t t,
                     const ConnectingMap& h);

/// Runs `method` in both directions. `h_ab` maps A into B and `h_ba` maps B
/// into A; they are ignored by FNN and KNN.
TestResult compare(Method method, const TimeSeries& a, const TimeSeries& b, const TestParams& params,
                   const ConnectingMap& h_ab, const ConnectingMap& h_ba);

/// Single direction of `method`.
DirectedValue run_directed(Method method, const TimeSeries& a, const TimeSeries& b,
                           const TestParams& params, const ConnectingMap& h);

}  // namespace conjtest
