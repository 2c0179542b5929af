#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "conjtest/core.hpp"

namespace conjtest {

/// Result of a k-nearest-neighbor query: nearest first, ties broken by
/// ascending series index.
struct NeighborQueryResult {
    std::vector<std::size_t> indices;
    std::vector<double> distances;

    std::size_t size() const { return indices.size(); }
    friend bool operator==(const NeighborQueryResult&, const NeighborQueryResult&) = default;
};

/// Sentinel for "exclude nothing".
inline constexpr std::size_t no_index = std::numeric_limits<std::size_t>::max();

/// Exhaustive search over the first `count` points of a series. Serves as the
/// reference implementation and as the index for wrapped metrics.
class BruteForceIndex {
public:
    BruteForceIndex(const TimeSeries& series, std::size_t count);

    std::size_t size() const { return count_; }

    NeighborQueryResult query(PointView q, std::size_t k, std::size_t exclude = no_index) const;
    std::vector<std::size_t> ball(PointView q, double radius, std::size_t last_tie) const;

private:
    const TimeSeries* series_;
    std::size_t count_;
};

/// Exact k-d tree over the first `count` points, for euclidean and maximum
/// metrics. Distances are computed with the same routine as the brute-force
/// path and pruning never discards a tie, so results are bit-identical to
/// `BruteForceIndex`.
class KdTree {
public:
    KdTree(const TimeSeries& series, std::size_t count, std::size_t leaf_size = 12);

    std::size_t size() const { return order_.size(); }

    NeighborQueryResult query(PointView q, std::size_t k, std::size_t exclude = no_index) const;
    std::vector<std::size_t> ball(PointView q, double radius, std::size_t last_tie) const;

private:
    struct Node {
        std::uint32_t begin = 0, end = 0;  // range in order_
        std::int32_t left = -1, right = -1;
        std::uint32_t split_dim = 0;
        double split = 0.0;
    };

    class Heap;

    std::int32_t build(std::uint32_t begin, std::uint32_t end);
    void search(std::int32_t node, PointView q, std::size_t exclude, Heap& heap) const;
    void collect(std::int32_t node, PointView q, double radius, std::size_t last_tie,
                 std::vector<std::size_t>& out) const;
    double plane_bound(double diff) const;

    const TimeSeries* series_;
    std::size_t leaf_size_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

/// Chooses a k-d tree for euclidean/maximum metrics and brute force for the
/// wrapped ones. Holds a reference to the series; the series must outlive it.
class NeighborIndex {
public:
    /// Index over points 0..count-1 (count defaults to the whole series).
    explicit NeighborIndex(const TimeSeries& series, std::optional<std::size_t> count = std::nullopt);

    std::size_t size() const { return count_; }
    bool accelerated() const { return tree_ != nullptr; }
    const TimeSeries& series() const { return *series_; }

    NeighborQueryResult knn(PointView q, std::size_t k) const;
    /// k nearest of series point `i`, with `i` itself removed from candidates.
    NeighborQueryResult knn_excl(std::size_t i, std::size_t k) const;
    std::size_t nearest(PointView q) const;
    /// Every indexed point whose (distance, index) key is at most
    /// (radius, last_tie), in ascending index order. This is the smallest
    /// nearest-neighbor set that contains the point with that key.
    std::vector<std::size_t> ball(PointView q, double radius, std::size_t last_tie) const;

private:
    NeighborQueryResult run(PointView q, std::size_t k, std::size_t exclude) const;

    const TimeSeries* series_;
    std::size_t count_;
    std::unique_ptr<KdTree> tree_;
    std::unique_ptr<BruteForceIndex> brute_;
};

/// k nearest points of `series` to `query`; if `restrict_to` is given only
/// indices below it are candidates. The query's own index is not removed.
NeighborQueryResult knn(PointView query, std::size_t k, const TimeSeries& series,
                        std::optional<std::size_t> restrict_to = std::nullopt);

/// k nearest of point `i` among the other points of `series`.
NeighborQueryResult knn_excl(std::size_t i, std::size_t k, const TimeSeries& series);

/// Hausdorff distance between two non-empty finite point sets, both given as
/// series of one metric kind.
double hausdorff(MetricKind kind, const TimeSeries& s1, const TimeSeries& s2);

/// Hausdorff distance between two index subsets of (possibly different)
/// series that share a metric kind.
double hausdorff(const TimeSeries& s1, std::span<const std::size_t> idx1,
                 const TimeSeries& s2, std::span<const std::size_t> idx2);

struct IndexValidationReport {
    std::size_t trials = 0;
    std::size_t mismatches = 0;
    bool accelerated = false;
    std::string first_failure;

    bool passed() const { return mismatches == 0; }
};

/// Compares the accelerated index with brute force on `trials` random
/// queries (series points, perturbed points, exclusion queries) with random k.
IndexValidationReport validate_index(const TimeSeries& series, std::size_t trials,
                                     std::uint64_t seed = 1);

}  // namespace conjtest
