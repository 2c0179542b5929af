#include "conjtest/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace conjtest {

std::uint64_t CounterRng::mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

TimeSeries gen_circle(double phi, double s, double start, std::size_t length) {
    if (!(s > 0.0)) throw Error("circle map exponent s must be positive");
    if (length == 0) throw Error("series length must be at least 1");
    std::vector<double> xs(length);
    double x = modone(start);
    for (std::size_t i = 0; i < length; ++i) {
        xs[i] = x;
        if (s == 1.0)
            x = modone(x + phi);
        else
            x = modone(std::pow(modone(std::pow(modone(x), s) + phi), 1.0 / s));
    }
    return TimeSeries(1, MetricKind::circle, std::move(xs));
}

TimeSeries gen_torus(double phi1, double phi2, std::array<double, 2> start, std::size_t length) {
    if (length == 0) throw Error("series length must be at least 1");
    std::vector<double> xs;
    xs.reserve(2 * length);
    double x = modone(start[0]), y = modone(start[1]);
    for (std::size_t i = 0; i < length; ++i) {
        xs.push_back(x);
        xs.push_back(y);
        x = modone(x + phi1);
        y = modone(y + phi2);
    }
    return TimeSeries(2, MetricKind::torus, std::move(xs));
}

TimeSeries gen_interval_map(IntervalMap kind, double param, double start, std::size_t length) {
    if (length == 0) throw Error("series length must be at least 1");
    if (!(start >= 0.0 && start <= 1.0)) throw Error("interval map start must lie in [0,1]");
    if (kind == IntervalMap::logistic && !(param >= 0.0 && param <= 4.0))
        throw Error("logistic parameter must lie in [0,4]");
    if (kind == IntervalMap::tent && !(param >= 0.0 && param <= 2.0))
        throw Error("tent parameter must lie in [0,2]");
    std::vector<double> xs(length);
    double x = start;
    for (std::size_t i = 0; i < length; ++i) {
        xs[i] = x;
        x = kind == IntervalMap::logistic ? param * x * (1.0 - x) : param * std::min(x, 1.0 - x);
    }
    return TimeSeries(1, MetricKind::euclidean, std::move(xs));
}

// ---------------------------------------------------------------------------
// Lorenz

namespace {

using State = std::array<double, 3>;

State lorenz_rhs(const LorenzParams& p, const State& y) {
    return {p.sigma * (y[1] - y[0]), y[0] * (p.rho - y[2]) - y[1], y[0] * y[1] - p.beta * y[2]};
}

// Dormand-Prince 5(4) tableau; the system is autonomous so the nodes c_i are unused
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense output (Hairer's CONTD5)
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

}  // namespace

TimeSeries gen_lorenz(std::array<double, 3> start, std::size_t length, std::size_t burn_in,
                      const LorenzParams& p) {
    if (length == 0) throw Error("series length must be at least 1");
    if (!(p.sample_time > 0.0)) throw Error("sample time must be positive");
    if (!(p.rtol > 0.0 && p.atol > 0.0)) throw Error("integrator tolerances must be positive");

    const std::size_t total = burn_in + length;
    std::vector<double> out;
    out.reserve(3 * length);
    auto emit = [&](std::size_t sample, const State& y) {
        if (sample >= burn_in) out.insert(out.end(), y.begin(), y.end());
    };

    State y = start;
    emit(0, y);
    std::size_t next_sample = 1;
    double t = 0.0;
    double h = std::min(1e-3, p.sample_time);
    State k1 = lorenz_rhs(p, y);
    std::size_t steps = 0;

    while (next_sample < total) {
        if (++steps > p.max_steps) {
            std::ostringstream msg;
            msg << "Lorenz integration exceeded " << p.max_steps << " steps at t = " << t;
            throw Error(msg.str());
        }
        if (!(h > 1e-14 * std::max(1.0, std::fabs(t)))) {
            std::ostringstream msg;
            msg << "Lorenz integration step size underflow at t = " << t << " (h = " << h << ")";
            throw Error(msg.str());
        }
        State tmp, k2, k3, k4, k5, k6, k7, y1;
        for (int c = 0; c < 3; ++c) tmp[c] = y[c] + h * a21 * k1[c];
        k2 = lorenz_rhs(p, tmp);
        for (int c = 0; c < 3; ++c) tmp[c] = y[c] + h * (a31 * k1[c] + a32 * k2[c]);
        k3 = lorenz_rhs(p, tmp);
        for (int c = 0; c < 3; ++c) tmp[c] = y[c] + h * (a41 * k1[c] + a42 * k2[c] + a43 * k3[c]);
        k4 = lorenz_rhs(p, tmp);
        for (int c = 0; c < 3; ++c)
            tmp[c] = y[c] + h * (a51 * k1[c] + a52 * k2[c] + a53 * k3[c] + a54 * k4[c]);
        k5 = lorenz_rhs(p, tmp);
        for (int c = 0; c < 3; ++c)
            tmp[c] = y[c] + h * (a61 * k1[c] + a62 * k2[c] + a63 * k3[c] + a64 * k4[c] + a65 * k5[c]);
        k6 = lorenz_rhs(p, tmp);
        for (int c = 0; c < 3; ++c)
            y1[c] = y[c] + h * (a71 * k1[c] + a73 * k3[c] + a74 * k4[c] + a75 * k5[c] + a76 * k6[c]);
        k7 = lorenz_rhs(p, y1);

        double err = 0.0;
        for (int c = 0; c < 3; ++c) {
            const double e = h * (e1 * k1[c] + e3 * k3[c] + e4 * k4[c] + e5 * k5[c] + e6 * k6[c] + e7 * k7[c]);
            const double scale = p.atol + p.rtol * std::max(std::fabs(y[c]), std::fabs(y1[c]));
            err += (e / scale) * (e / scale);
        }
        err = std::sqrt(err / 3.0);
        if (!std::isfinite(err)) {
            h *= 0.2;
            continue;
        }

        if (err <= 1.0) {
            const double t1 = t + h;
            double sample_t = static_cast<double>(next_sample) * p.sample_time;
            if (sample_t <= t1) {
                State r2, r3, r4, r5;
                for (int c = 0; c < 3; ++c) {
                    const double diff = y1[c] - y[c];
                    const double bspl = h * k1[c] - diff;
                    r2[c] = diff;
                    r3[c] = bspl;
                    r4[c] = diff - h * k7[c] - bspl;
                    r5[c] = h * (d1 * k1[c] + d3 * k3[c] + d4 * k4[c] + d5 * k5[c] + d6 * k6[c] + d7 * k7[c]);
                }
                while (next_sample < total && sample_t <= t1) {
                    const double theta = (sample_t - t) / h;
                    const double theta1 = 1.0 - theta;
                    State ys;
                    for (int c = 0; c < 3; ++c)
                        ys[c] = y[c] + theta * (r2[c] + theta1 * (r3[c] + theta * (r4[c] + theta1 * r5[c])));
                    emit(next_sample, ys);
                    ++next_sample;
                    sample_t = static_cast<double>(next_sample) * p.sample_time;
                }
            }
            t = t1;
            y = y1;
            k1 = k7;
            const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h *= factor;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        }
    }
    return TimeSeries(3, MetricKind::euclidean, std::move(out));
}

// ---------------------------------------------------------------------------
// Klein bottle

Point klein_point(double u, double v) {
    const double cu2 = std::cos(u / 2.0), su2 = std::sin(u / 2.0);
    const double cv = std::cos(v), sv = std::sin(v), s2v = std::sin(2.0 * v);
    return {cu2 * cv - su2 * s2v, su2 * cv + cu2 * s2v, 8.0 * std::cos(u) * (1.0 + sv / 2.0),
            8.0 * std::sin(u) * (1.0 + sv / 2.0)};
}

TimeSeries gen_klein(double phi1, double phi2, std::array<double, 2> start, std::size_t length) {
    if (length == 0) throw Error("series length must be at least 1");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    auto wrap = [](double x) {
        double r = std::fmod(x, two_pi);
        if (r < 0.0) r += two_pi;
        return r >= two_pi ? 0.0 : r;
    };
    std::vector<double> xs;
    xs.reserve(4 * length);
    double u = wrap(start[0]), v = wrap(start[1]);
    for (std::size_t i = 0; i < length; ++i) {
        const Point p = klein_point(u, v);
        xs.insert(xs.end(), p.begin(), p.end());
        u = wrap(u + phi1);
        v = wrap(v + phi2);
    }
    return TimeSeries(4, MetricKind::euclidean, std::move(xs));
}

// ---------------------------------------------------------------------------

TimeSeries add_noise(const TimeSeries& series, double eps, std::uint64_t seed) {
    if (!(eps >= 0.0)) throw Error("noise amplitude must be non-negative");
    if (eps == 0.0) return series;
    CounterRng rng(seed);
    std::vector<double> coords = series.coords();
    for (double& v : coords) v += eps * (2.0 * rng.uniform() - 1.0);
    // the constructor re-wraps circle/torus coordinates
    return TimeSeries(series.dim(), series.metric(), std::move(coords));
}

}  // namespace conjtest
