#pragma once

// Spectral Hamiltonians and the Strang split-step propagator.
//
// A Hamiltonian here is T + V on a periodic grid with T = c |k|^2 applied in
// Fourier space and V diagonal in position. The scaled meta-Hamiltonian is
// the Dim = 2 case with c = 1/(2 kappa) and V(x, y) = v(|x - y|); the
// relative-coordinate factor is the Dim = 1 case with c = 1/kappa.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <vector>

#include "metagrav/errors.hpp"
#include "metagrav/fft.hpp"
#include "metagrav/field.hpp"
#include "metagrav/potential.hpp"

namespace metagrav {

using RadialProfile = std::function<double(double)>;

struct EnergyStats {
    double expect = 0.0;
    double std = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
    /// |<H>| / std, large when the state is close to an eigenstate.
    [[nodiscard]] double bound_dominance() const { return std::abs(expect) / std; }
};

template <std::size_t Dim>
class Hamiltonian {
public:
    Hamiltonian(Grid grid, std::vector<double> potential, double kinetic_coeff)
        : grid_(grid), potential_(std::move(potential)), coeff_(kinetic_coeff), fft_(grid.points()) {
        Field<Dim> probe(grid_);
        if (potential_.size() != probe.size()) throw DataError("Hamiltonian: potential size does not match grid");
        if (!(kinetic_coeff > 0.0)) throw DomainError("Hamiltonian: kinetic coefficient must be positive");
        for (double v : potential_) {
            if (!std::isfinite(v)) throw DataError("Hamiltonian: non-finite potential value");
        }
        symbol_.resize(probe.size());
        const auto n = grid_.points();
        if constexpr (Dim == 1) {
            for (std::size_t i = 0; i < n; ++i) symbol_[i] = coeff_ * sq(grid_.wavenumber(i));
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                const double ki2 = sq(grid_.wavenumber(i));
                for (std::size_t j = 0; j < n; ++j) symbol_[i * n + j] = coeff_ * (ki2 + sq(grid_.wavenumber(j)));
            }
        }
    }

    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] double kinetic_coeff() const { return coeff_; }
    [[nodiscard]] const std::vector<double>& potential() const { return potential_; }
    /// c |k|^2 per FFT bin.
    [[nodiscard]] const std::vector<double>& kinetic_symbol() const { return symbol_; }
    [[nodiscard]] const FftPlan<Dim>& fft() const { return fft_; }

    /// Largest kinetic eigenvalue on the grid (Nyquist corner).
    [[nodiscard]] double max_kinetic() const { return coeff_ * static_cast<double>(Dim) * sq(grid_.nyquist()); }

    [[nodiscard]] Field<Dim> apply_kinetic(const Field<Dim>& psi) const {
        Field<Dim> out = psi;
        fft_.forward(out.data());
        for (std::size_t k = 0; k < out.size(); ++k) out[k] *= symbol_[k];
        fft_.inverse(out.data());
        return out;
    }

    [[nodiscard]] Field<Dim> apply(const Field<Dim>& psi) const {
        check(psi);
        Field<Dim> out = apply_kinetic(psi);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += potential_[k] * psi[k];
        return out;
    }

    [[nodiscard]] EnergyStats energy(const Field<Dim>& psi) const {
        check(psi);
        const double n2 = psi.norm2();
        if (!(n2 > 0.0)) throw DataError("Hamiltonian::energy: zero field");
        const Field<Dim> t_psi = apply_kinetic(psi);
        EnergyStats s;
        double kin = 0.0, pot = 0.0, h2 = 0.0;
        for (std::size_t k = 0; k < psi.size(); ++k) {
            const cplx hk = t_psi[k] + potential_[k] * psi[k];
            kin += (std::conj(psi[k]) * t_psi[k]).real();
            pot += potential_[k] * std::norm(psi[k]);
            h2 += std::norm(hk);
        }
        const double dv = psi.cell_volume();
        s.kinetic = kin * dv / n2;
        s.potential = pot * dv / n2;
        s.expect = s.kinetic + s.potential;
        s.std = std::sqrt(std::max(0.0, h2 * dv / n2 - s.expect * s.expect));
        return s;
    }

    void check(const Field<Dim>& psi) const {
        if (!(psi.grid() == grid_)) throw DataError("Hamiltonian: field grid does not match");
    }

private:
    static double sq(double x) { return x * x; }

    Grid grid_;
    std::vector<double> potential_;
    double coeff_;
    std::vector<double> symbol_;
    FftPlan<Dim> fft_;
};

/// V(x_i) = profile(x_i).
inline std::vector<double> line_potential(const Grid& g, const RadialProfile& profile) {
    std::vector<double> v(g.points());
    for (std::size_t i = 0; i < g.points(); ++i) v[i] = profile(g.coord(i));
    return v;
}

/// V(x_i, y_j) = profile(x_i - y_j).
inline std::vector<double> meta_potential(const Grid& g, const RadialProfile& profile) {
    const auto n = g.points();
    std::vector<double> v(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) v[i * n + j] = profile(g.coord(i) - g.coord(j));
    }
    return v;
}

/// Scaled meta-Hamiltonian of the physical body and its hidden partner on a 2D grid.
inline std::shared_ptr<const Hamiltonian<2>> meta_hamiltonian(const Grid& g, double kappa,
                                                              const RadialProfile& profile = GravityProfile{}) {
    if (!(kappa > 0.0)) throw DomainError("meta_hamiltonian: kappa must be positive");
    return std::make_shared<Hamiltonian<2>>(g, meta_potential(g, profile), 1.0 / (2.0 * kappa));
}

/// Relative-coordinate Hamiltonian -(1/kappa) d^2/du^2 + v(|u|), reduced scaled mass kappa/2.
inline std::shared_ptr<const Hamiltonian<1>> relative_hamiltonian(const Grid& g, double kappa,
                                                                  const RadialProfile& profile = GravityProfile{}) {
    if (!(kappa > 0.0)) throw DomainError("relative_hamiltonian: kappa must be positive");
    return std::make_shared<Hamiltonian<1>>(g, line_potential(g, profile), 1.0 / kappa);
}

struct PropagatorConfig {
    double dt = 0.01;
    std::size_t steps_per_snapshot = 100;
    double mask_width = 0.0;    // fraction of the extent tapered at each edge
    double mask_strength = 0.0; // amplitude fraction removed per step at the very edge

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("propagator: dt must be positive");
        if (steps_per_snapshot == 0) throw ConfigError("propagator: steps_per_snapshot must be >= 1");
        if (!(mask_width >= 0.0 && mask_width < 0.25)) throw ConfigError("propagator: mask width must lie in [0, 0.25)");
        if (!(mask_strength >= 0.0 && mask_strength <= 1.0)) throw ConfigError("propagator: mask strength must lie in [0, 1]");
    }

    [[nodiscard]] bool mask_enabled() const { return mask_width > 0.0 && mask_strength > 0.0; }
};

/// dt giving a kinetic phase of `max_phase` at the Nyquist corner.
template <std::size_t Dim>
double stable_dt(const Hamiltonian<Dim>& h, double max_phase = std::numbers::pi / 4.0) {
    return max_phase / h.max_kinetic();
}

/// Cosine-ramp amplitude taper: 1 in the interior, 1 - strength at the box edge.
inline std::vector<double> absorbing_mask(const Grid& g, double width_fraction, double strength) {
    std::vector<double> m(g.points(), 1.0);
    const double w = width_fraction * g.extent();
    if (w <= 0.0 || strength <= 0.0) return m;
    const double half = 0.5 * g.extent();
    for (std::size_t i = 0; i < g.points(); ++i) {
        const double to_edge = half - std::abs(g.coord(i));
        if (to_edge < w) {
            const double c = std::cos(0.5 * std::numbers::pi * std::max(0.0, to_edge) / w);
            m[i] = 1.0 - strength * c * c;
        }
    }
    return m;
}

/// Strang splitting: exp(-i dt V/2) exp(-i dt T) exp(-i dt V/2), then the optional mask.
template <std::size_t Dim>
class SplitStepPropagator {
public:
    SplitStepPropagator(std::shared_ptr<const Hamiltonian<Dim>> h, PropagatorConfig cfg, double direction = 1.0)
        : h_(std::move(h)), cfg_(cfg), direction_(direction) {
        if (!h_) throw ConfigError("propagator: null Hamiltonian");
        cfg_.validate();
        if (h_->max_kinetic() * cfg_.dt > std::numbers::pi) {
            throw ConfigError("propagator: dt too large, kinetic phase at Nyquist exceeds pi (max dt " +
                              std::to_string(std::numbers::pi / h_->max_kinetic()) + ")");
        }
        const double sdt = direction_ * cfg_.dt;
        const auto& v = h_->potential();
        half_v_.resize(v.size());
        for (std::size_t k = 0; k < v.size(); ++k) half_v_[k] = std::polar(1.0, -0.5 * sdt * v[k]);
        const auto& t = h_->kinetic_symbol();
        full_t_.resize(t.size());
        for (std::size_t k = 0; k < t.size(); ++k) full_t_[k] = std::polar(1.0, -sdt * t[k]);
        if (cfg_.mask_enabled()) mask_ = absorbing_mask(h_->grid(), cfg_.mask_width, cfg_.mask_strength);
    }

    /// Propagator for the same Hamiltonian running backwards in time.
    [[nodiscard]] SplitStepPropagator reversed() const { return SplitStepPropagator(h_, cfg_, -direction_); }

    void step(Field<Dim>& psi) const {
        h_->check(psi);
        auto data = psi.data();
        for (std::size_t k = 0; k < data.size(); ++k) data[k] *= half_v_[k];
        h_->fft().forward(data);
        for (std::size_t k = 0; k < data.size(); ++k) data[k] *= full_t_[k];
        h_->fft().inverse(data);
        for (std::size_t k = 0; k < data.size(); ++k) data[k] *= half_v_[k];
        if (!mask_.empty()) apply_mask(psi);
    }

    void advance(Field<Dim>& psi, std::size_t steps) const {
        for (std::size_t s = 0; s < steps; ++s) step(psi);
        if (!psi.finite()) throw NumericalError("propagator: field became non-finite");
    }

    [[nodiscard]] const Hamiltonian<Dim>& hamiltonian() const { return *h_; }
    [[nodiscard]] const PropagatorConfig& config() const { return cfg_; }
    [[nodiscard]] double dt() const { return direction_ * cfg_.dt; }
    /// Kinetic phase per step at the Nyquist corner.
    [[nodiscard]] double max_kinetic_phase() const { return h_->max_kinetic() * cfg_.dt; }

private:
    void apply_mask(Field<Dim>& psi) const {
        const auto n = psi.points();
        if constexpr (Dim == 1) {
            for (std::size_t i = 0; i < n; ++i) psi(i) *= mask_[i];
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) psi(i, j) *= mask_[i] * mask_[j];
            }
        }
    }

    std::shared_ptr<const Hamiltonian<Dim>> h_;
    PropagatorConfig cfg_;
    double direction_;
    std::vector<cplx> half_v_;
    std::vector<cplx> full_t_;
    std::vector<double> mask_;
};

/// Unentangled Gaussian meta-state Psi(x) Psi(y), Psi(x) ~ exp(-x^2/lambda0^2),
/// i.e. exp(-(x-y)^2/(2 lambda0^2)) exp(-(x+y)^2/(2 lambda0^2)), normalized on the grid.
inline Field2D init_gaussian_meta(double lambda0, const Grid& grid) {
    if (!(lambda0 > 0.0)) throw DomainError("init_gaussian_meta: width must be positive");
    if (!(lambda0 < grid.extent() / 8.0)) throw DomainError("init_gaussian_meta: width must be below extent/8");
    const double inv = 1.0 / (lambda0 * lambda0);
    // Separable evaluation keeps the x <-> y symmetry exact.
    std::vector<double> g(grid.points());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::exp(-grid.coord(i) * grid.coord(i) * inv);
    Field2D xi(grid);
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) xi(i, j) = g[i] * g[j];
    }
    xi.normalize();
    return xi;
}

/// max |Xi(x, y) - Xi(y, x)|.
inline double swap_asymmetry(const Field2D& xi) {
    const auto n = xi.points();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) worst = std::max(worst, std::abs(xi(i, j) - xi(j, i)));
    }
    return worst;
}

} // namespace metagrav
