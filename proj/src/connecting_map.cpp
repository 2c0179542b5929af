#include "conjtest/connecting_map.hpp"

#include <charconv>
#include <numbers>

namespace conjtest {

namespace {

double parse_number(std::string_view text, std::string_view what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw Error("invalid " + std::string(what) + " '" + std::string(text) + "'");
    return v;
}

std::size_t parse_count(std::string_view text, std::string_view what) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || v == 0)
        throw Error("invalid " + std::string(what) + " '" + std::string(text) + "'");
    return v;
}

}  // namespace

ConnectingMap ConnectingMap::identity() {
    return analytic("identity", [](PointView p) { return Point(p.begin(), p.end()); });
}

ConnectingMap ConnectingMap::analytic(std::string name, Function fn) {
    ConnectingMap map;
    map.name_ = std::move(name);
    map.fn_ = std::move(fn);
    return map;
}

ConnectingMap ConnectingMap::index_paired(TimeSeries image, std::string name) {
    ConnectingMap map;
    map.name_ = std::move(name);
    map.paired_ = std::make_shared<const TimeSeries>(std::move(image));
    return map;
}

ConnectingMap ConnectingMap::parse(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view head = text.substr(0, colon);
    const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    const std::string name(text);

    if (head == "identity" || head == "id") return identity();
    if (head == "pow") {
        // h_s(x) = <x>^s, coordinatewise
        const double s = parse_number(arg, "exponent");
        if (!(s > 0.0)) throw Error("pow exponent must be positive");
        return analytic(name, [s](PointView p) {
            Point out(p.size());
            for (std::size_t c = 0; c < p.size(); ++c) out[c] = std::pow(modone(p[c]), s);
            return out;
        });
    }
    if (head == "arcsin") {
        // conjugates the logistic map f_4 to the tent map g_2
        return analytic(name, [](PointView p) {
            Point out(p.size());
            for (std::size_t c = 0; c < p.size(); ++c) {
                if (p[c] < 0.0 || p[c] > 1.0) throw Error("arcsin map is defined on [0,1] only");
                out[c] = 2.0 * std::asin(std::sqrt(p[c])) / std::numbers::pi;
            }
            return out;
        });
    }
    if (head == "sinsq") {
        // inverse of arcsin: y -> sin^2(pi y / 2)
        return analytic(name, [](PointView p) {
            Point out(p.size());
            for (std::size_t c = 0; c < p.size(); ++c) {
                const double s = std::sin(std::numbers::pi * p[c] / 2.0);
                out[c] = s * s;
            }
            return out;
        });
    }
    if (head == "proj") {
        const std::size_t j = parse_count(arg, "coordinate");
        return analytic(name, [j](PointView p) {
            if (j > p.size()) throw Error("proj coordinate exceeds point dimension");
            return Point{p[j - 1]};
        });
    }
    if (head == "pad") {
        const std::size_t d = parse_count(arg, "dimension");
        return analytic(name, [d](PointView p) {
            if (d < p.size()) throw Error("pad dimension is smaller than point dimension");
            Point out(d, 0.0);
            std::copy(p.begin(), p.end(), out.begin());
            return out;
        });
    }
    if (head == "paired") throw Error("map 'paired' needs an image series");
    throw Error("unknown connecting map '" + name + "'");
}

TimeSeries ConnectingMap::image_of(const TimeSeries& domain, MetricKind target_metric) const {
    if (paired_) {
        if (paired_->size() != domain.size())
            throw Error("index-paired map '" + name_ + "' has " + std::to_string(paired_->size()) +
                        " image points for a domain of " + std::to_string(domain.size()));
        return paired_->with_metric(target_metric);
    }
    if (!fn_) throw Error("connecting map is empty");
    std::vector<double> coords;
    std::size_t dim = 0;
    for (std::size_t i = 0; i < domain.size(); ++i) {
        Point y = fn_(domain[i]);
        if (i == 0) {
            dim = y.size();
            coords.reserve(dim * domain.size());
        } else if (y.size() != dim) {
            throw Error("connecting map '" + name_ + "' changed output dimension");
        }
        coords.insert(coords.end(), y.begin(), y.end());
    }
    return TimeSeries(dim, target_metric, std::move(coords));
}

}  // namespace conjtest
