#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

#include "conjtest/core.hpp"

namespace conjtest {

/// Counter-based generator: the n-th draw is SplitMix64 applied to
/// seed + (n+1) * golden-gamma, so any draw can be reproduced from
/// (seed, n) alone.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    static std::uint64_t mix(std::uint64_t z);

    std::uint64_t at(std::uint64_t counter) const {
        return mix(seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL);
    }
    std::uint64_t next() { return at(counter_++); }
    /// Uniform in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

/// Orbit of the circle map x -> (<<x>^s + phi>)^(1/s), conjugate to the
/// rigid rotation by phi via h_s(x) = <x>^s. s = 1 is the rotation itself.
TimeSeries gen_circle(double phi, double s, double start, std::size_t length);

/// Orbit of the torus rotation by (phi1, phi2), measured with the maximum
/// of the two circle distances.
TimeSeries gen_torus(double phi1, double phi2, std::array<double, 2> start, std::size_t length);

enum class IntervalMap { logistic, tent };

/// Orbit of l*x*(1-x) (logistic) or mu*min(x, 1-x) (tent) from `start`.
/// The tent map with mu = 2 is exact in binary floating point, so its
/// orbits collapse onto 0 after roughly 55 steps.
TimeSeries gen_interval_map(IntervalMap kind, double param, double start, std::size_t length);

struct LorenzParams {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
    double sample_time = 0.02;
    double rtol = 1e-9;
    double atol = 1e-11;
    std::size_t max_steps = 50'000'000;
};

/// Samples the Lorenz flow every `sample_time` with an adaptive
/// Dormand-Prince 5(4) integrator and dense output. Sample 0 is `start`;
/// the first `burn_in` samples are dropped and `length` are kept.
TimeSeries gen_lorenz(std::array<double, 3> start, std::size_t length, std::size_t burn_in,
                      const LorenzParams& params = {});

/// Klein bottle immersion in R^4, parameterized by two angles.
Point klein_point(double u, double v);

/// Rotation by (phi1, phi2) radians in parameter space (mod 2*pi), mapped
/// into R^4. Euclidean metric.
TimeSeries gen_klein(double phi1, double phi2, std::array<double, 2> start, std::size_t length);

/// Adds independent uniform noise in [-eps, eps] to every coordinate.
/// Wrapped series are re-wrapped into [0,1).
TimeSeries add_noise(const TimeSeries& series, double eps, std::uint64_t seed);

}  // namespace conjtest
