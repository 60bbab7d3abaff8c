#pragma once

// Exact centre-of-mass / relative separation of the scaled meta-dynamics.
//
// With d = x - y and s = x + y the meta-Hamiltonian splits into
// -(1/kappa) d_s^2 (free) plus -(1/kappa) d_d^2 + v(|d|). For the Gaussian
// product initial state Xi = Phi(d) Theta(s), Theta stays an analytic free
// Gaussian and only Phi needs a 1D split-step evolution.

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <vector>

#include "metagrav/errors.hpp"
#include "metagrav/field.hpp"
#include "metagrav/propagator.hpp"

namespace metagrav {

/// Free Gaussian solving i dTheta/dt = -c Theta'' with Theta(s, 0) ~ exp(-s^2 / (2 a^2)),
/// normalized to unit L2 norm on the line.
struct FreeGaussian {
    double a = 1.0;     // initial width parameter
    double coeff = 1.0; // kinetic coefficient c

    [[nodiscard]] cplx value(double s, double t) const {
        const cplx w2(a * a, 2.0 * coeff * t);
        const double pref = std::pow(std::numbers::pi, -0.25) / std::sqrt(a);
        return pref * std::sqrt(cplx(a * a) / w2) * std::exp(-s * s / (2.0 * w2));
    }

    /// Standard deviation of |Theta|^2 at time t.
    [[nodiscard]] double position_std(double t) const {
        const double r = 2.0 * coeff * t / (a * a);
        return a / std::numbers::sqrt2 * std::sqrt(1.0 + r * r);
    }

    /// <T> = c <k^2>, conserved.
    [[nodiscard]] double kinetic_energy() const { return coeff / (2.0 * a * a); }
    [[nodiscard]] double kinetic_std() const { return coeff / (std::numbers::sqrt2 * a * a); }

    /// Time at which the position spread grows by `factor`.
    [[nodiscard]] double time_to_widen(double factor) const {
        return a * a / (2.0 * coeff) * std::sqrt(factor * factor - 1.0);
    }
};

/// Relative-coordinate grid matching a meta grid: same spacing, twice the
/// extent, so every x_i - y_j is a node.
inline Grid relative_grid_for(const Grid& meta) { return Grid(2.0 * meta.extent(), 2 * meta.points()); }

class FactoredEvolution {
public:
    FactoredEvolution(double lambda0, const Grid& meta_grid, double kappa, PropagatorConfig cfg,
                      const RadialProfile& profile = GravityProfile{})
        : meta_grid_(meta_grid),
          rel_grid_(relative_grid_for(meta_grid)),
          kappa_(kappa),
          cm_{lambda0, 1.0 / kappa},
          h_(relative_hamiltonian(rel_grid_, kappa, profile)),
          prop_(h_, cfg),
          phi_(rel_grid_) {
        if (!(lambda0 > 0.0)) throw DomainError("FactoredEvolution: width must be positive");
        if (!(lambda0 < meta_grid.extent() / 8.0)) throw DomainError("FactoredEvolution: width must be below extent/8");
        const double inv = 1.0 / (2.0 * lambda0 * lambda0);
        for (std::size_t k = 0; k < rel_grid_.points(); ++k) {
            const double d = rel_grid_.coord(k);
            phi_(k) = std::exp(-d * d * inv);
        }
        phi_.normalize();
    }

    void advance(std::size_t steps) {
        prop_.advance(phi_, steps);
        time_ += static_cast<double>(steps) * prop_.dt();
    }

    [[nodiscard]] double time() const { return time_; }
    [[nodiscard]] double kappa() const { return kappa_; }
    [[nodiscard]] const Field1D& relative() const { return phi_; }
    [[nodiscard]] const FreeGaussian& centre_of_mass() const { return cm_; }
    [[nodiscard]] const Grid& meta_grid() const { return meta_grid_; }
    [[nodiscard]] const Hamiltonian<1>& relative_hamiltonian_ref() const { return *h_; }
    [[nodiscard]] const SplitStepPropagator<1>& propagator() const { return prop_; }

    /// Relative growth of the centre-of-mass spread since t = 0.
    [[nodiscard]] double theta_width_growth() const { return cm_.position_std(time_) / cm_.position_std(0.0) - 1.0; }

    /// Meta-energy: relative part from the grid, sum-coordinate part analytic.
    [[nodiscard]] EnergyStats meta_energy() const {
        EnergyStats rel = h_->energy(phi_);
        EnergyStats out = rel;
        out.kinetic += cm_.kinetic_energy();
        out.expect += cm_.kinetic_energy();
        out.std = std::sqrt(rel.std * rel.std + cm_.kinetic_std() * cm_.kinetic_std());
        return out;
    }

    /// Xi(x_i, y_j) = sqrt(2) Phi(x_i - y_j) Theta(x_i + y_j) on the meta grid, normalized.
    [[nodiscard]] Field2D reconstruct() const {
        const auto n = meta_grid_.points();
        const double h = meta_grid_.spacing();
        // x_i + y_j = (i + j - n) h takes 2n - 1 distinct values.
        std::vector<cplx> theta(2 * n);
        for (std::size_t m = 0; m + 1 < 2 * n; ++m) {
            theta[m] = cm_.value((static_cast<double>(m) - static_cast<double>(n)) * h, time_);
        }
        Field2D xi(meta_grid_);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                // d = (i - j) h sits at relative index i - j + n.
                xi(i, j) = std::numbers::sqrt2 * phi_(i + n - j) * theta[i + j];
            }
        }
        xi.normalize();
        return xi;
    }

private:
    Grid meta_grid_;
    Grid rel_grid_;
    double kappa_;
    FreeGaussian cm_;
    std::shared_ptr<const Hamiltonian<1>> h_;
    SplitStepPropagator<1> prop_;
    Field1D phi_;
    double time_ = 0.0;
};

} // namespace metagrav
