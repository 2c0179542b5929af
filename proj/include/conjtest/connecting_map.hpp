#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "conjtest/core.hpp"

namespace conjtest {

/// Candidate (semi-)conjugacy h between the phase spaces of two series.
///
/// Either an analytic function applied pointwise, or an index-paired table
/// where h(a_i) is the i-th point of a fixed image series. The latter is
/// how connecting maps between a trajectory and its own delay embedding
/// are expressed: they are only known on the sampled points.
class ConnectingMap {
public:
    using Function = std::function<Point(PointView)>;

    static ConnectingMap identity();
    static ConnectingMap analytic(std::string name, Function fn);
    /// h(a_i) := image[i]. The image must have the domain's length.
    static ConnectingMap index_paired(TimeSeries image, std::string name = "paired");

    /// Parses the map names understood by the CLI and the experiment specs:
    /// `identity`, `pow:s`, `arcsin`, `sinsq`, `proj:j`, `pad:d`.
    /// `paired` needs an image series and is not accepted here.
    static ConnectingMap parse(std::string_view text);

    const std::string& name() const { return name_; }
    bool is_index_paired() const { return paired_ != nullptr; }

    /// h applied to every point of `domain`; the result carries
    /// `target_metric`. Throws if h is undefined somewhere on the domain.
    TimeSeries image_of(const TimeSeries& domain, MetricKind target_metric) const;

private:
    std::string name_;
    Function fn_;
    std::shared_ptr<const TimeSeries> paired_;
};

}  // namespace conjtest
