#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace conjtest {

/// Raised for every violated precondition in the library (bad dimensions,
/// too-short series, invalid parameters).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Which distance a time series is measured with.
///
/// `circle` is R/Z with the shorter-arc metric; `torus` is the product of
/// circles with the maximum over coordinates. Wrapped points are stored as
/// representatives in [0,1).
enum class MetricKind { euclidean, maximum, circle, torus };

std::string_view to_string(MetricKind kind);
MetricKind parse_metric(std::string_view name);

/// Wrapped kinds (circle, torus) keep coordinates in [0,1).
constexpr bool is_wrapped(MetricKind kind) {
    return kind == MetricKind::circle || kind == MetricKind::torus;
}

using Point = std::vector<double>;
using PointView = std::span<const double>;

/// Fractional part x - floor(x), always in [0,1).
inline double modone(double x) {
    double r = x - std::floor(x);
    // x slightly below an integer can round up to exactly 1.
    return r >= 1.0 ? 0.0 : r;
}

/// Shorter-arc distance on R/Z. Exactly symmetric in its arguments.
inline double circle_distance(double x, double y) {
    double a = modone(x - y);
    double b = modone(y - x);
    return a < b ? a : b;
}

/// Distance under `kind`. Callers guarantee equal sizes; this is the hot
/// path of every neighbor query, so it does not re-check.
inline double distance_unchecked(MetricKind kind, PointView p, PointView q) {
    const std::size_t dim = p.size();
    switch (kind) {
    case MetricKind::euclidean: {
        double sum = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
            double d = p[c] - q[c];
            sum += d * d;
        }
        return std::sqrt(sum);
    }
    case MetricKind::maximum: {
        double best = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
            double d = std::fabs(p[c] - q[c]);
            if (d > best) best = d;
        }
        return best;
    }
    case MetricKind::circle:
    case MetricKind::torus: {
        double best = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
            double d = circle_distance(p[c], q[c]);
            if (d > best) best = d;
        }
        return best;
    }
    }
    return 0.0;
}

/// Checked distance: throws on dimension mismatch or when the dimension is
/// incompatible with the metric kind.
double distance(MetricKind kind, PointView p, PointView q);

/// Checks that `dim` is admissible for `kind` (circle needs 1, torus >= 2).
void check_dimension(MetricKind kind, std::size_t dim);

/// A finite trajectory: points in trajectory order, all of one dimension,
/// stored contiguously.
class TimeSeries {
public:
    TimeSeries() = default;

    /// `coords` holds size*dim values, row-major. Wrapped kinds are
    /// re-wrapped into [0,1).
    TimeSeries(std::size_t dim, MetricKind metric, std::vector<double> coords);

    static TimeSeries from_points(const std::vector<Point>& points, MetricKind metric);
    static TimeSeries scalar(const std::vector<double>& values,
                             MetricKind metric = MetricKind::euclidean);

    std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
    std::size_t dim() const { return dim_; }
    bool empty() const { return coords_.empty(); }
    MetricKind metric() const { return metric_; }

    PointView operator[](std::size_t i) const {
        return PointView(coords_.data() + i * dim_, dim_);
    }
    PointView at(std::size_t i) const;
    double value(std::size_t i, std::size_t coord) const { return coords_[i * dim_ + coord]; }

    const std::vector<double>& coords() const { return coords_; }

    /// First `count` points (count <= size()).
    TimeSeries prefix(std::size_t count) const;
    /// Same coordinates, different metric (revalidated).
    TimeSeries with_metric(MetricKind metric) const;

    double distance(std::size_t i, std::size_t j) const {
        return distance_unchecked(metric_, (*this)[i], (*this)[j]);
    }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::size_t dim_ = 0;
    MetricKind metric_ = MetricKind::euclidean;
    std::vector<double> coords_;
};

/// Total standard deviation: sqrt of the summed per-coordinate population
/// variances, taken over the stored representatives.
double series_std(const TimeSeries& series);

/// Largest pairwise distance.
double diam(const TimeSeries& series);

/// Reads one point per row; comma or whitespace separated. An optional
/// `# space=<kind>` line sets the metric (default euclidean); other `#`
/// lines are ignored.
TimeSeries read_csv(std::istream& in);
TimeSeries read_csv_file(const std::string& path);

/// Writes the `# space=` header followed by one row per point, using the
/// shortest round-trip decimal representation.
void write_csv(std::ostream& out, const TimeSeries& series);
void write_csv_file(const std::string& path, const TimeSeries& series);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

}  // namespace conjtest
