#pragma once

#include <cstddef>
#include <optional>

#include "conjtest/core.hpp"

namespace conjtest {

/// Delay-embedding window: `dimension` samples spaced `lag` apart.
struct EmbeddingSpec {
    std::size_t dimension = 1;
    std::size_t lag = 1;
};

/// Delay embedding of a scalar series. Point j is
/// (s_j, s_{j+lag}, ..., s_{j+(d-1)lag}) for every window that fits, so the
/// result has n - (d-1)*lag points. Uses the maximum metric unless `metric`
/// is given.
TimeSeries takens_embed(const TimeSeries& scalar, EmbeddingSpec spec,
                        std::optional<MetricKind> metric = std::nullopt);

/// Scalar series of coordinate `coord` (1-based). Wrapped series stay on the
/// circle; everything else becomes a euclidean scalar series.
TimeSeries project(const TimeSeries& series, std::size_t coord);

/// Scalar observable: mean of the coordinates of each point.
TimeSeries observable_mean(const TimeSeries& series);

/// First `count` points of `series`, used to line up series of unequal length.
TimeSeries truncate(const TimeSeries& series, std::size_t count);

}  // namespace conjtest
