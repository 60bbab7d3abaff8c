#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "metagrav/errors.hpp"
#include "metagrav/field.hpp"
#include "metagrav/potential.hpp"
#include "metagrav/propagator.hpp"

namespace metagrav {

enum class BoundaryMode {
    FullLine, // 1D relative coordinate on the whole line (desk-scale analog)
    Radial,   // 3D s-wave: u(r) = r R(r) as an odd function, u(0) = 0
};

struct GroundStateOptions {
    /// Imaginary-time steps, coarse to fine; each stage starts from the previous state.
    std::vector<double> dt_ladder{1.0, 0.1, 0.01, 0.002};
    std::size_t steps_per_sweep = 20;
    double energy_tol = 1e-10; // energy change per sweep
    std::size_t max_sweeps = 200000;
};

struct GroundStateResult {
    bool bound = false;          // e0 < 0
    bool self_localized = false; // e0 below the contact energy v(2)
    double energy = 0.0;
    EnergyStats stats{};
    Field1D state;
    std::size_t sweeps = 0;
};

namespace detail {
inline void enforce_parity(Field1D& psi, BoundaryMode mode) {
    const auto& g = psi.grid();
    const double sign = mode == BoundaryMode::Radial ? -1.0 : 1.0;
    for (std::size_t i = 0; i < g.points(); ++i) {
        const auto j = g.mirror(i);
        if (j < i) continue;
        const cplx a = psi(i);
        const cplx b = psi(j);
        psi(i) = 0.5 * (a + sign * b);
        psi(j) = sign * psi(i);
    }
}
} // namespace detail

/// Lowest state of -(1/kappa) d^2/du^2 + v(|u|) by imaginary-time split-step
/// relaxation, converged when the Rayleigh-quotient energy changes by less
/// than `energy_tol` between sweeps at the finest step.
inline GroundStateResult imaginary_time_ground_state(const RadialProfile& profile, double kappa, const Grid& grid,
                                                     BoundaryMode mode, const GroundStateOptions& opts = {}) {
    if (!(kappa > 0.0)) throw DomainError("imaginary_time_ground_state: kappa must be positive");
    if (opts.dt_ladder.empty()) throw ConfigError("imaginary_time_ground_state: empty dt ladder");
    const auto h = relative_hamiltonian(grid, kappa, profile);
    const auto& v = h->potential();
    const auto& t = h->kinetic_symbol();

    const double w = std::clamp(2.0 / std::sqrt(kappa), 0.5, grid.extent() / 10.0);
    Field1D psi = sample(grid, [&](double x) {
        const double g = std::exp(-x * x / (2.0 * w * w));
        return cplx(mode == BoundaryMode::Radial ? x * g : g);
    });
    psi.normalize();

    GroundStateResult res;
    double energy = h->energy(psi).expect;
    std::vector<double> half_v(v.size()), full_t(t.size());
    for (double dt : opts.dt_ladder) {
        if (!(dt > 0.0)) throw ConfigError("imaginary_time_ground_state: dt must be positive");
        for (std::size_t k = 0; k < v.size(); ++k) half_v[k] = std::exp(-0.5 * dt * v[k]);
        for (std::size_t k = 0; k < t.size(); ++k) full_t[k] = std::exp(-dt * t[k]);
        bool converged = false;
        for (std::size_t sweep = 0; sweep < opts.max_sweeps; ++sweep) {
            for (std::size_t s = 0; s < opts.steps_per_sweep; ++s) {
                auto data = psi.data();
                for (std::size_t k = 0; k < data.size(); ++k) data[k] *= half_v[k];
                h->fft().forward(data);
                for (std::size_t k = 0; k < data.size(); ++k) data[k] *= full_t[k];
                h->fft().inverse(data);
                for (std::size_t k = 0; k < data.size(); ++k) data[k] *= half_v[k];
            }
            detail::enforce_parity(psi, mode);
            psi.normalize();
            ++res.sweeps;
            const double e = h->energy(psi).expect;
            const bool settled = std::abs(e - energy) < opts.energy_tol;
            energy = e;
            if (settled) {
                converged = true;
                break;
            }
        }
        if (!converged) throw NumericalError("imaginary_time_ground_state: no convergence within max_sweeps");
    }

    // Real, positive-leaning representative.
    cplx phase{};
    for (std::size_t k = 0; k < psi.size(); ++k) phase += psi[k] * std::abs(psi[k]);
    if (std::abs(phase) > 0.0) {
        const cplx rot = std::conj(phase) / std::abs(phase);
        for (auto& a : psi.data()) a *= rot;
    }

    res.stats = h->energy(psi);
    res.energy = res.stats.expect;
    res.bound = res.energy < 0.0;
    res.self_localized = res.energy < v_contact();
    res.state = std::move(psi);
    return res;
}

} // namespace metagrav
