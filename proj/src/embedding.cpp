#include "conjtest/embedding.hpp"

namespace conjtest {

TimeSeries takens_embed(const TimeSeries& scalar, EmbeddingSpec spec,
                        std::optional<MetricKind> metric) {
    if (scalar.dim() != 1) throw Error("delay embedding needs a scalar series");
    if (spec.dimension == 0 || spec.lag == 0) throw Error("embedding dimension and lag must be >= 1");
    const std::size_t span = (spec.dimension - 1) * spec.lag;
    const std::size_t n = scalar.size();
    if (n < span + 1)
        throw Error("series of length " + std::to_string(n) + " is too short for dimension " +
                    std::to_string(spec.dimension) + " with lag " + std::to_string(spec.lag));
    const std::size_t count = n - span;
    std::vector<double> coords;
    coords.reserve(count * spec.dimension);
    for (std::size_t j = 0; j < count; ++j)
        for (std::size_t c = 0; c < spec.dimension; ++c)
            coords.push_back(scalar.value(j + c * spec.lag, 0));
    MetricKind kind = metric.value_or(MetricKind::maximum);
    if (kind == MetricKind::circle && spec.dimension > 1) kind = MetricKind::torus;
    return TimeSeries(spec.dimension, kind, std::move(coords));
}

TimeSeries project(const TimeSeries& series, std::size_t coord) {
    if (coord == 0 || coord > series.dim())
        throw Error("coordinate " + std::to_string(coord) + " out of range for dimension " +
                    std::to_string(series.dim()));
    std::vector<double> values(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) values[i] = series.value(i, coord - 1);
    const MetricKind kind = is_wrapped(series.metric()) ? MetricKind::circle : MetricKind::euclidean;
    return TimeSeries(1, kind, std::move(values));
}

TimeSeries observable_mean(const TimeSeries& series) {
    std::vector<double> values(series.size());
    const auto dim = static_cast<double>(series.dim());
    for (std::size_t i = 0; i < series.size(); ++i) {
        double sum = 0.0;
        for (std::size_t c = 0; c < series.dim(); ++c) sum += series.value(i, c);
        values[i] = sum / dim;
    }
    return TimeSeries(1, MetricKind::euclidean, std::move(values));
}

TimeSeries truncate(const TimeSeries& series, std::size_t count) { return series.prefix(count); }

}  // namespace conjtest
