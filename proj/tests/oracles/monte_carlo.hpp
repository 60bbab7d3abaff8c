#pragma once

// Monte-Carlo reference for <V> in the Gaussian meta-state: X and Y are
// independent 3D normals with per-component standard deviation Lambda0/2.

#include <cmath>
#include <cstdint>
#include <random>

#include "metagrav/potential.hpp"
#include "metagrav/units.hpp"

namespace oracle {

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    double sample_std = 0.0;
};

inline McEstimate mc_mean_potential(const metagrav::PhysicalScenario& s, std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 0.5 * s.width_cm);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        double d2 = 0.0;
        for (int c = 0; c < 3; ++c) {
            const double dx = normal(rng) - normal(rng);
            d2 += dx * dx;
        }
        const double v = metagrav::V_physical(std::sqrt(d2), s);
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(samples);
    McEstimate e;
    e.mean = sum / n;
    e.sample_std = std::sqrt(std::max(0.0, sum2 / n - e.mean * e.mean));
    e.std_error = e.sample_std / std::sqrt(n);
    return e;
}

} // namespace oracle
