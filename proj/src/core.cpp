#include "conjtest/core.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace conjtest {

std::string_view to_string(MetricKind kind) {
    switch (kind) {
    case MetricKind::euclidean: return "euclidean";
    case MetricKind::maximum: return "maximum";
    case MetricKind::circle: return "circle";
    case MetricKind::torus: return "torus";
    }
    return "euclidean";
}

MetricKind parse_metric(std::string_view name) {
    if (name == "euclidean") return MetricKind::euclidean;
    if (name == "maximum" || name == "max") return MetricKind::maximum;
    if (name == "circle") return MetricKind::circle;
    if (name == "torus") return MetricKind::torus;
    throw Error("unknown metric kind '" + std::string(name) + "'");
}

void check_dimension(MetricKind kind, std::size_t dim) {
    if (dim == 0) throw Error("points must have at least one coordinate");
    if (kind == MetricKind::circle && dim != 1)
        throw Error("circle metric requires dimension 1, got " + std::to_string(dim));
    if (kind == MetricKind::torus && dim < 2)
        throw Error("torus metric requires dimension >= 2, got " + std::to_string(dim));
}

double distance(MetricKind kind, PointView p, PointView q) {
    if (p.size() != q.size())
        throw Error("dimension mismatch: " + std::to_string(p.size()) + " vs " +
                    std::to_string(q.size()));
    check_dimension(kind, p.size());
    return distance_unchecked(kind, p, q);
}

TimeSeries::TimeSeries(std::size_t dim, MetricKind metric, std::vector<double> coords)
    : dim_(dim), metric_(metric), coords_(std::move(coords)) {
    check_dimension(metric_, dim_);
    if (coords_.empty()) throw Error("time series must contain at least one point");
    if (coords_.size() % dim_ != 0)
        throw Error("coordinate count is not a multiple of the dimension");
    for (double& v : coords_) {
        if (!std::isfinite(v)) throw Error("time series contains a non-finite coordinate");
        if (is_wrapped(metric_)) v = modone(v);
    }
}

TimeSeries TimeSeries::from_points(const std::vector<Point>& points, MetricKind metric) {
    if (points.empty()) throw Error("time series must contain at least one point");
    const std::size_t dim = points.front().size();
    std::vector<double> coords;
    coords.reserve(points.size() * dim);
    for (const auto& p : points) {
        if (p.size() != dim) throw Error("all points of a time series must share one dimension");
        coords.insert(coords.end(), p.begin(), p.end());
    }
    return TimeSeries(dim, metric, std::move(coords));
}

TimeSeries TimeSeries::scalar(const std::vector<double>& values, MetricKind metric) {
    return TimeSeries(1, metric, values);
}

PointView TimeSeries::at(std::size_t i) const {
    if (i >= size())
        throw Error("index " + std::to_string(i) + " out of range for series of length " +
                    std::to_string(size()));
    return (*this)[i];
}

TimeSeries TimeSeries::prefix(std::size_t count) const {
    if (count == 0 || count > size())
        throw Error("prefix length " + std::to_string(count) + " invalid for series of length " +
                    std::to_string(size()));
    return TimeSeries(dim_, metric_,
                      std::vector<double>(coords_.begin(), coords_.begin() + count * dim_));
}

TimeSeries TimeSeries::with_metric(MetricKind metric) const {
    return TimeSeries(dim_, metric, coords_);
}

double series_std(const TimeSeries& series) {
    const std::size_t n = series.size();
    if (n < 2) throw Error("standard deviation needs at least 2 points");
    double total = 0.0;
    for (std::size_t c = 0; c < series.dim(); ++c) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += series.value(i, c);
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = series.value(i, c) - mean;
            var += d * d;
        }
        total += var / static_cast<double>(n);
    }
    return std::sqrt(total);
}

double diam(const TimeSeries& series) {
    double best = 0.0;
    const std::size_t n = series.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) best = std::max(best, series.distance(i, j));
    return best;
}

namespace {

std::string_view trim(std::string_view s) {
    auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

TimeSeries read_csv(std::istream& in) {
    MetricKind metric = MetricKind::euclidean;
    std::vector<double> coords;
    std::size_t dim = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (view.empty()) continue;
        if (view.front() == '#') {
            auto pos = view.find("space=");
            if (pos != std::string_view::npos) metric = parse_metric(trim(view.substr(pos + 6)));
            continue;
        }
        std::size_t row_dim = 0;
        std::size_t pos = 0;
        while (pos < view.size()) {
            while (pos < view.size() && (view[pos] == ',' || view[pos] == ' ' || view[pos] == '\t'))
                ++pos;
            if (pos >= view.size()) break;
            std::size_t end = pos;
            while (end < view.size() && view[end] != ',' && view[end] != ' ' && view[end] != '\t')
                ++end;
            double v = 0.0;
            // from_chars rejects a leading '+', strip it
            std::size_t start = pos;
            if (view[start] == '+') ++start;
            auto [ptr, ec] = std::from_chars(view.data() + start, view.data() + end, v);
            if (ec != std::errc() || ptr != view.data() + end)
                throw Error("line " + std::to_string(line_no) + ": cannot parse '" +
                            std::string(view.substr(pos, end - pos)) + "' as a number");
            coords.push_back(v);
            ++row_dim;
            pos = end;
        }
        if (dim == 0) dim = row_dim;
        if (row_dim != dim)
            throw Error("line " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                        " columns, found " + std::to_string(row_dim));
    }
    if (coords.empty()) throw Error("time series file contains no points");
    return TimeSeries(dim, metric, std::move(coords));
}

TimeSeries read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return read_csv(in);
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const TimeSeries& series) {
    out << "# space=" << to_string(series.metric()) << '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
        for (std::size_t c = 0; c < series.dim(); ++c) {
            if (c) out << ',';
            out << format_double(series.value(i, c));
        }
        out << '\n';
    }
}

void write_csv_file(const std::string& path, const TimeSeries& series) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    write_csv(out, series);
}

}  // namespace conjtest
