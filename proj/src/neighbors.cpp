#include "conjtest/neighbors.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace conjtest {

namespace {

struct Candidate {
    double dist;
    std::size_t index;
};

inline bool key_less(const Candidate& a, const Candidate& b) {
    return a.dist < b.dist || (a.dist == b.dist && a.index < b.index);
}

NeighborQueryResult to_result(std::vector<Candidate>& cands) {
    NeighborQueryResult out;
    out.indices.reserve(cands.size());
    out.distances.reserve(cands.size());
    for (const auto& c : cands) {
        out.indices.push_back(c.index);
        out.distances.push_back(c.dist);
    }
    return out;
}

void check_k(std::size_t k, std::size_t available) {
    if (k == 0) throw Error("k must be at least 1");
    if (k > available)
        throw Error("k = " + std::to_string(k) + " exceeds the " + std::to_string(available) +
                    " available candidates");
}

void check_query(const TimeSeries& series, PointView q) {
    if (q.size() != series.dim())
        throw Error("query dimension " + std::to_string(q.size()) +
                    " does not match series dimension " + std::to_string(series.dim()));
}

}  // namespace

// ---------------------------------------------------------------------------
// brute force

BruteForceIndex::BruteForceIndex(const TimeSeries& series, std::size_t count)
    : series_(&series), count_(count) {
    if (count_ == 0 || count_ > series.size()) throw Error("invalid candidate count for index");
}

NeighborQueryResult BruteForceIndex::query(PointView q, std::size_t k, std::size_t exclude) const {
    const MetricKind kind = series_->metric();
    std::vector<Candidate> cands;
    cands.reserve(count_);
    for (std::size_t j = 0; j < count_; ++j) {
        if (j == exclude) continue;
        cands.push_back({distance_unchecked(kind, q, (*series_)[j]), j});
    }
    if (k < cands.size()) {
        std::nth_element(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(k), cands.end(), key_less);
        cands.resize(k);
    }
    std::sort(cands.begin(), cands.end(), key_less);
    return to_result(cands);
}

std::vector<std::size_t> BruteForceIndex::ball(PointView q, double radius, std::size_t last_tie) const {
    const MetricKind kind = series_->metric();
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < count_; ++j) {
        const double d = distance_unchecked(kind, q, (*series_)[j]);
        if (d < radius || (d == radius && j <= last_tie)) out.push_back(j);
    }
    return out;
}

// ---------------------------------------------------------------------------
// k-d tree

class KdTree::Heap {
public:
    explicit Heap(std::size_t k) : k_(k) { items_.reserve(k + 1); }

    bool full() const { return items_.size() == k_; }
    double worst() const { return items_.front().dist; }

    void offer(double dist, std::size_t index) {
        Candidate c{dist, index};
        if (!full()) {
            items_.push_back(c);
            std::push_heap(items_.begin(), items_.end(), key_less);
        } else if (key_less(c, items_.front())) {
            std::pop_heap(items_.begin(), items_.end(), key_less);
            items_.back() = c;
            std::push_heap(items_.begin(), items_.end(), key_less);
        }
    }

    std::vector<Candidate> take_sorted() {
        std::sort_heap(items_.begin(), items_.end(), key_less);
        return std::move(items_);
    }

private:
    std::size_t k_;
    std::vector<Candidate> items_;
};

KdTree::KdTree(const TimeSeries& series, std::size_t count, std::size_t leaf_size)
    : series_(&series), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
    const MetricKind kind = series.metric();
    if (kind != MetricKind::euclidean && kind != MetricKind::maximum)
        throw Error("k-d tree supports euclidean and maximum metrics only");
    if (count == 0 || count > series.size()) throw Error("invalid candidate count for index");
    if (count > std::numeric_limits<std::uint32_t>::max()) throw Error("series too large for index");
    order_.resize(count);
    for (std::size_t i = 0; i < count; ++i) order_[i] = static_cast<std::uint32_t>(i);
    nodes_.reserve(2 * count / leaf_size_ + 1);
    build(0, static_cast<std::uint32_t>(count));
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(Node{begin, end});
    if (end - begin <= leaf_size_) return id;

    const std::size_t dim = series_->dim();
    std::uint32_t best_dim = 0;
    double best_spread = -1.0;
    for (std::size_t c = 0; c < dim; ++c) {
        double lo = series_->value(order_[begin], c), hi = lo;
        for (std::uint32_t i = begin + 1; i < end; ++i) {
            const double v = series_->value(order_[i], c);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            best_dim = static_cast<std::uint32_t>(c);
        }
    }
    if (best_spread <= 0.0) return id;  // all points coincide: keep as leaf

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         return series_->value(a, best_dim) < series_->value(b, best_dim);
                     });
    const double split = series_->value(order_[mid], best_dim);
    const std::int32_t left = build(begin, mid);
    const std::int32_t right = build(mid, end);
    Node& node = nodes_[static_cast<std::size_t>(id)];
    node.left = left;
    node.right = right;
    node.split_dim = best_dim;
    node.split = split;
    return id;
}

double KdTree::plane_bound(double diff) const {
    // Mirrors the per-coordinate term of distance_unchecked so the bound can
    // never exceed a distance computed for a point beyond the plane.
    if (series_->metric() == MetricKind::euclidean) return std::sqrt(diff * diff);
    return diff;
}

void KdTree::search(std::int32_t node_id, PointView q, std::size_t exclude, Heap& heap) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    if (node.left < 0) {
        const MetricKind kind = series_->metric();
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
            const std::size_t idx = order_[i];
            if (idx == exclude) continue;
            heap.offer(distance_unchecked(kind, q, (*series_)[idx]), idx);
        }
        return;
    }
    const double qv = q[node.split_dim];
    const bool go_left = qv < node.split;
    const std::int32_t near = go_left ? node.left : node.right;
    const std::int32_t far = go_left ? node.right : node.left;
    search(near, q, exclude, heap);
    const double bound = plane_bound(go_left ? node.split - qv : qv - node.split);
    // Equal bound must still be explored: a tie may carry a lower index.
    if (!heap.full() || bound <= heap.worst()) search(far, q, exclude, heap);
}

void KdTree::collect(std::int32_t node_id, PointView q, double radius, std::size_t last_tie,
                     std::vector<std::size_t>& out) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    if (node.left < 0) {
        const MetricKind kind = series_->metric();
        for (std::uint32_t i = node.begin; i < node.end; ++i) {
            const std::size_t idx = order_[i];
            const double d = distance_unchecked(kind, q, (*series_)[idx]);
            if (d < radius || (d == radius && idx <= last_tie)) out.push_back(idx);
        }
        return;
    }
    const double qv = q[node.split_dim];
    const bool go_left = qv < node.split;
    collect(go_left ? node.left : node.right, q, radius, last_tie, out);
    if (plane_bound(go_left ? node.split - qv : qv - node.split) <= radius)
        collect(go_left ? node.right : node.left, q, radius, last_tie, out);
}

std::vector<std::size_t> KdTree::ball(PointView q, double radius, std::size_t last_tie) const {
    std::vector<std::size_t> out;
    collect(0, q, radius, last_tie, out);
    std::sort(out.begin(), out.end());
    return out;
}

NeighborQueryResult KdTree::query(PointView q, std::size_t k, std::size_t exclude) const {
    Heap heap(k);
    search(0, q, exclude, heap);
    auto sorted = heap.take_sorted();
    return to_result(sorted);
}

// ---------------------------------------------------------------------------
// facade

NeighborIndex::NeighborIndex(const TimeSeries& series, std::optional<std::size_t> count)
    : series_(&series), count_(count.value_or(series.size())) {
    if (count_ == 0 || count_ > series.size())
        throw Error("index restricted to " + std::to_string(count_) +
                    " points of a series of length " + std::to_string(series.size()));
    if (series.metric() == MetricKind::euclidean || series.metric() == MetricKind::maximum)
        tree_ = std::make_unique<KdTree>(series, count_);
    else
        brute_ = std::make_unique<BruteForceIndex>(series, count_);
}

NeighborQueryResult NeighborIndex::run(PointView q, std::size_t k, std::size_t exclude) const {
    return tree_ ? tree_->query(q, k, exclude) : brute_->query(q, k, exclude);
}

NeighborQueryResult NeighborIndex::knn(PointView q, std::size_t k) const {
    check_query(*series_, q);
    check_k(k, count_);
    return run(q, k, no_index);
}

NeighborQueryResult NeighborIndex::knn_excl(std::size_t i, std::size_t k) const {
    if (i >= count_) throw Error("query index outside the indexed range");
    check_k(k, count_ - 1);
    return run((*series_)[i], k, i);
}

std::size_t NeighborIndex::nearest(PointView q) const { return knn(q, 1).indices.front(); }

std::vector<std::size_t> NeighborIndex::ball(PointView q, double radius, std::size_t last_tie) const {
    check_query(*series_, q);
    return tree_ ? tree_->ball(q, radius, last_tie) : brute_->ball(q, radius, last_tie);
}

NeighborQueryResult knn(PointView query, std::size_t k, const TimeSeries& series,
                        std::optional<std::size_t> restrict_to) {
    return NeighborIndex(series, restrict_to).knn(query, k);
}

NeighborQueryResult knn_excl(std::size_t i, std::size_t k, const TimeSeries& series) {
    return NeighborIndex(series).knn_excl(i, k);
}

// ---------------------------------------------------------------------------
// Hausdorff

namespace {

double directed(const TimeSeries& s1, std::span<const std::size_t> idx1, const TimeSeries& s2,
                std::span<const std::size_t> idx2, MetricKind kind) {
    double sup = 0.0;
    for (std::size_t a : idx1) {
        double inf = std::numeric_limits<double>::infinity();
        for (std::size_t b : idx2) {
            inf = std::min(inf, distance_unchecked(kind, s1[a], s2[b]));
            if (inf <= sup) break;  // cannot raise the supremum any more
        }
        sup = std::max(sup, inf);
    }
    return sup;
}

}  // namespace

double hausdorff(const TimeSeries& s1, std::span<const std::size_t> idx1, const TimeSeries& s2,
                 std::span<const std::size_t> idx2) {
    if (idx1.empty() || idx2.empty()) throw Error("Hausdorff distance of an empty set");
    if (s1.dim() != s2.dim()) throw Error("Hausdorff distance between sets of different dimension");
    const MetricKind kind = s2.metric();
    return std::max(directed(s1, idx1, s2, idx2, kind), directed(s2, idx2, s1, idx1, kind));
}

double hausdorff(MetricKind kind, const TimeSeries& s1, const TimeSeries& s2) {
    if (s1.empty() || s2.empty()) throw Error("Hausdorff distance of an empty set");
    if (s1.dim() != s2.dim()) throw Error("Hausdorff distance between sets of different dimension");
    check_dimension(kind, s1.dim());
    std::vector<std::size_t> i1(s1.size()), i2(s2.size());
    for (std::size_t i = 0; i < i1.size(); ++i) i1[i] = i;
    for (std::size_t i = 0; i < i2.size(); ++i) i2[i] = i;
    return std::max(directed(s1, i1, s2, i2, kind), directed(s2, i2, s1, i1, kind));
}

// ---------------------------------------------------------------------------
// validation

IndexValidationReport validate_index(const TimeSeries& series, std::size_t trials,
                                     std::uint64_t seed) {
    if (series.empty()) throw Error("cannot validate an index over an empty series");
    IndexValidationReport report;
    const std::size_t n = series.size();
    const NeighborIndex index(series);
    const BruteForceIndex brute(series, n);
    report.accelerated = index.accelerated();

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double scale = n > 1 ? std::max(diam(series.prefix(std::min<std::size_t>(n, 200))), 1e-3) : 1.0;

    for (std::size_t t = 0; t < trials; ++t) {
        ++report.trials;
        const std::size_t base = pick(rng);
        const int mode = static_cast<int>(rng() % 3);
        Point q(series[base].begin(), series[base].end());
        std::size_t exclude = no_index;
        if (mode == 1) {
            for (double& v : q) v += 0.05 * scale * unit(rng);
            if (is_wrapped(series.metric()))
                for (double& v : q) v = modone(v);
        } else if (mode == 2 && n > 1) {
            exclude = base;
        }
        const std::size_t available = exclude == no_index ? n : n - 1;
        const std::size_t k = 1 + static_cast<std::size_t>(rng() % std::min<std::size_t>(available, 32));

        const NeighborQueryResult fast =
            exclude == no_index ? index.knn(q, k) : index.knn_excl(exclude, k);
        const NeighborQueryResult slow = brute.query(q, k, exclude);
        if (!(fast == slow)) {
            ++report.mismatches;
            if (report.first_failure.empty()) {
                std::ostringstream msg;
                msg << "trial " << t << ": query at series index " << base << " (mode " << mode
                    << ", k=" << k << ") disagrees with brute force";
                report.first_failure = msg.str();
            }
        }
    }
    return report;
}

}  // namespace conjtest
