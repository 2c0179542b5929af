#include "conjtest/conjugacy.hpp"

#include <algorithm>
#include <atomic>

#include "conjtest/embedding.hpp"
#include "conjtest/neighbors.hpp"
#include "parallel.hpp"

namespace conjtest {

namespace {

std::atomic<unsigned> g_threads{0};

void require_equal_lengths(const TimeSeries& a, const TimeSeries& b, std::string_view method) {
    if (a.size() != b.size())
        throw Error(std::string(method) + " needs index-paired series of equal length (" +
                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
}

// Fixed-order sum of per-index terms, independent of worker count.
double ordered_sum(const std::vector<double>& terms) {
    double sum = 0.0;
    for (double v : terms) sum += v;
    return sum;
}

// Everything conjtest and conjtest+ share: h applied to A, the clipped
// neighbor pools, and the nearest-sample approximation of h.
struct ConjtestSetup {
    TimeSeries image;       // h(a_i) for every i, in B's metric
    std::size_t evaluated;  // n - t
    std::size_t pool_b;     // m - t
    double diam_b;
    std::unique_ptr<NeighborIndex> index_b;  // B clipped to m - t
    std::vector<std::size_t> h_tilde;        // nearest B-index of h(a_j), j < n - t
};

ConjtestSetup prepare(const TimeSeries& a, const TimeSeries& b, std::size_t k, std::size_t t,
                      const ConnectingMap& h) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    if (t == 0) throw Error("time horizon t must be at least 1");
    if (t >= std::min(n, m))
        throw Error("time horizon t = " + std::to_string(t) + " must be smaller than both series lengths (" +
                    std::to_string(n) + ", " + std::to_string(m) + ")");
    if (k == 0) throw Error("k must be at least 1");
    if (k > n - t)
        throw Error("k = " + std::to_string(k) + " exceeds the " + std::to_string(n - t) +
                    " points that have t successors");

    ConjtestSetup setup{h.image_of(a, b.metric()), n - t, m - t, 0.0, nullptr, {}};
    if (setup.image.dim() != b.dim())
        throw Error("connecting map '" + h.name() + "' produces dimension " +
                    std::to_string(setup.image.dim()) + " but the target series has dimension " +
                    std::to_string(b.dim()));
    setup.diam_b = diam(b);
    if (setup.diam_b == 0.0) throw Error("target series has zero diameter");

    setup.index_b = std::make_unique<NeighborIndex>(b, setup.pool_b);
    setup.h_tilde.resize(setup.evaluated);
    detail::parallel_chunks(setup.evaluated, worker_threads(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t j = lo; j < hi; ++j) setup.h_tilde[j] = setup.index_b->nearest(setup.image[j]);
    });
    return setup;
}

}  // namespace

std::string_view to_string(Method method) {
    switch (method) {
    case Method::fnn: return "fnn";
    case Method::knn: return "knn";
    case Method::conjtest: return "conjtest";
    case Method::conjtest_plus: return "conjtest+";
    }
    return "fnn";
}

Method parse_method(std::string_view name) {
    if (name == "fnn") return Method::fnn;
    if (name == "knn") return Method::knn;
    if (name == "conjtest") return Method::conjtest;
    if (name == "conjtest+" || name == "conjtest_plus" || name == "conjtestplus")
        return Method::conjtest_plus;
    throw Error("unknown method '" + std::string(name) + "'");
}

void set_worker_threads(unsigned threads) { g_threads = threads; }
unsigned worker_threads() { return g_threads; }

// ---------------------------------------------------------------------------
// FNN

DirectedValue fnn_test_detail(const TimeSeries& a, const TimeSeries& b, double r) {
    require_equal_lengths(a, b, "fnn");
    const std::size_t n = a.size();
    if (n < 3) throw Error("fnn needs at least 3 points");
    if (!(r > 0.0)) throw Error("fnn threshold r must be positive");

    const double admit = series_std(a) / r;
    const NeighborIndex index(a);
    std::vector<unsigned char> admissible(n, 0), is_false(n, 0);
    detail::parallel_chunks(n, worker_threads(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto nn = index.knn_excl(i, 1);
            const std::size_t j = nn.indices.front();
            const double da = nn.distances.front();
            // Heaviside with Theta(0) = 0 on both factors
            if (!(admit - da > 0.0)) continue;
            admissible[i] = 1;
            const double db = b.distance(i, j);
            // da == 0 with db > 0 is an infinite ratio; 0/0 never fires
            const bool fires = da > 0.0 ? (db / da - r > 0.0) : (db > 0.0);
            is_false[i] = fires ? 1 : 0;
        }
    });
    std::size_t denominator = 0, numerator = 0;
    for (std::size_t i = 0; i < n; ++i) {
        denominator += admissible[i];
        numerator += is_false[i];
    }
    if (denominator == 0)
        throw Error("fnn: no admissible pairs (no nearest neighbor closer than sigma/r)");
    return {static_cast<double>(numerator) / static_cast<double>(denominator), denominator};
}

double fnn_test(const TimeSeries& a, const TimeSeries& b, double r) {
    return fnn_test_detail(a, b, r).value;
}

double fnn_dim(const TimeSeries& scalar, double r, std::size_t d, std::size_t lag) {
    const TimeSeries high = takens_embed(scalar, {d + 1, lag});
    const TimeSeries low = takens_embed(scalar, {d, lag});
    return fnn_test(truncate(low, high.size()), high, r);
}

// ---------------------------------------------------------------------------
// KNN

DirectedValue knn_test_detail(const TimeSeries& a, const TimeSeries& b, std::size_t k) {
    require_equal_lengths(a, b, "knn");
    const std::size_t n = a.size();
    if (k == 0) throw Error("k must be at least 1");
    if (k >= n) throw Error("knn needs k < n (k = " + std::to_string(k) + ", n = " + std::to_string(n) + ")");

    const NeighborIndex index(a);
    const MetricKind kind_b = b.metric();
    std::vector<std::size_t> extra(n, 0);
    detail::parallel_chunks(n, worker_threads(), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto hood = index.knn_excl(i, k);
            // The image neighborhood is covered exactly when the knn-set of b_i
            // reaches the worst-ranked image point.
            double worst_d = -1.0;
            std::size_t worst_j = 0;
            for (std::size_t u : hood.indices) {
                const double d = distance_unchecked(kind_b, b[i], b[u]);
                if (d > worst_d || (d == worst_d && u > worst_j)) {
                    worst_d = d;
                    worst_j = u;
                }
            }
            std::size_t rank = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double d = distance_unchecked(kind_b, b[i], b[j]);
                if (d < worst_d || (d == worst_d && j <= worst_j)) ++rank;
            }
            extra[i] = rank > k ? rank - k : 0;
        }
    });
    std::size_t total = 0;
    for (std::size_t e : extra) total += e;
    const double nn = static_cast<double>(n);
    return {static_cast<double>(total) / (nn * nn), n};
}

double knn_test(const TimeSeries& a, const TimeSeries& b, std::size_t k) {
    return knn_test_detail(a, b, k).value;
}

// ---------------------------------------------------------------------------
// conjtest / conjtest+

DirectedValue conjtest_detail(const TimeSeries& a, const TimeSeries& b, std::size_t k, std::size_t t,
                              const ConnectingMap& h) {
    const ConjtestSetup setup = prepare(a, b, k, t, h);
    const NeighborIndex index_a(a, setup.evaluated);

    std::vector<double> terms(setup.evaluated, 0.0);
    detail::parallel_chunks(setup.evaluated, worker_threads(), [&](std::size_t lo, std::size_t hi) {
        std::vector<std::size_t> forward(k), image(k);
        for (std::size_t i = lo; i < hi; ++i) {
            const auto hood = index_a.knn(a[i], k);
            for (std::size_t u = 0; u < k; ++u) {
                const std::size_t j = hood.indices[u];
                forward[u] = j + t;                   // (h o f^t)(a_j) = h(a_{j+t})
                image[u] = setup.h_tilde[j] + t;      // (g^t o h~)(a_j)
            }
            terms[i] = hausdorff(setup.image, forward, b, image);
        }
    });
    const double value = ordered_sum(terms) / (static_cast<double>(setup.evaluated) * setup.diam_b);
    return {value, setup.evaluated};
}

double conjtest(const TimeSeries& a, const TimeSeries& b, std::size_t k, std::size_t t,
                const ConnectingMap& h) {
    return conjtest_detail(a, b, k, t, h).value;
}

DirectedValue conjtest_plus_detail(const TimeSeries& a, const TimeSeries& b, std::size_t k,
                                   std::size_t t, const ConnectingMap& h) {
    const ConjtestSetup setup = prepare(a, b, k, t, h);
    const NeighborIndex index_a(a, setup.evaluated);
    const MetricKind kind_b = b.metric();

    std::vector<double> terms(setup.evaluated, 0.0);
    detail::parallel_chunks(setup.evaluated, worker_threads(), [&](std::size_t lo, std::size_t hi) {
        std::vector<std::size_t> forward(k);
        for (std::size_t i = lo; i < hi; ++i) {
            const auto hood = index_a.knn(a[i], k);
            const PointView center = setup.image[i];
            // worst-ranked point of h~(U) as seen from h(a_i)
            double worst_d = -1.0;
            std::size_t worst_j = 0;
            for (std::size_t u = 0; u < k; ++u) {
                const std::size_t j = hood.indices[u];
                forward[u] = j + t;
                const std::size_t q = setup.h_tilde[j];
                const double d = distance_unchecked(kind_b, center, b[q]);
                if (d > worst_d || (d == worst_d && q > worst_j)) {
                    worst_d = d;
                    worst_j = q;
                }
            }
            std::vector<std::size_t> enriched = setup.index_b->ball(center, worst_d, worst_j);
            for (std::size_t& q : enriched) q += t;
            terms[i] = hausdorff(setup.image, forward, b, enriched);
        }
    });
    const double value = ordered_sum(terms) / (static_cast<double>(setup.evaluated) * setup.diam_b);
    return {value, setup.evaluated};
}

double conjtest_plus(const TimeSeries& a, const TimeSeries& b, std::size_t k, std::size_t t,
                     const ConnectingMap& h) {
    return conjtest_plus_detail(a, b, k, t, h).value;
}

// ---------------------------------------------------------------------------

DirectedValue run_directed(Method method, const TimeSeries& a, const TimeSeries& b,
                           const TestParams& params, const ConnectingMap& h) {
    switch (method) {
    case Method::fnn: return fnn_test_detail(a, b, params.r);
    case Method::knn: return knn_test_detail(a, b, params.k);
    case Method::conjtest: return conjtest_detail(a, b, params.k, params.t, h);
    case Method::conjtest_plus: return conjtest_plus_detail(a, b, params.k, params.t, h);
    }
    throw Error("unknown method");
}

TestResult compare(Method method, const TimeSeries& a, const TimeSeries& b, const TestParams& params,
                   const ConnectingMap& h_ab, const ConnectingMap& h_ba) {
    TestResult result;
    result.method = method;
    result.params = params;
    result.ab = run_directed(method, a, b, params, h_ab);
    result.ba = run_directed(method, b, a, params, h_ba);
    return result;
}

}  // namespace conjtest
