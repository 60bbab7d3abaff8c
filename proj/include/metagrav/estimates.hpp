#pragma once

// Closed-form localization estimates for a matter ball prepared in the
// unentangled Gaussian meta-state Psi(X) Psi(Y), Psi(X) ~ exp(-X^2/Lambda0^2)
// in three dimensions.
//
// Width convention: |Psi|^2 has per-component variance Lambda0^2/4, the
// relative coordinate D = X - Y has per-component variance Lambda0^2/2 and
// the centre of mass (X + Y)/2 has per-component variance Lambda0^2/8.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "metagrav/errors.hpp"
#include "metagrav/potential.hpp"
#include "metagrav/units.hpp"

namespace metagrav {

inline constexpr const char* gaussian_width_convention =
    "Psi(X) ~ exp(-X^2/Lambda0^2) in 3D; per-component variance Lambda0^2/4";

struct GaussianEnergy {
    double expect_erg = 0.0;    // <H_G>
    double std_erg = 0.0;       // sqrt(<H_G^2> - <H_G>^2)
    double kinetic_erg = 0.0;   // analytic kinetic part of <H_G> (both bodies)
    double potential_erg = 0.0; // <V>
    /// |<H_G>| / std; order one for a state dominated by bound metastates.
    [[nodiscard]] double bound_dominance() const { return std::abs(expect_erg) / std_erg; }
};

struct EstimateReport {
    double K_bar = 0.0;           // erg, time-averaged relative kinetic energy
    double Lambda = 0.0;          // cm, localization length
    double tau_loc = 0.0;         // s
    double N_branches = 0.0;      // number of localized branches
    double entropy_over_kB = 0.0; // ln N
    double t_spread = 0.0;        // s, centre-of-mass spreading time
    double n_principal = 0.0;     // hydrogenic principal quantum number at the virial energy
    double H_G_expect = 0.0;      // erg
    double H_G_std = 0.0;         // erg
    double H_G_kinetic = 0.0;     // erg
    double H_G_potential = 0.0;   // erg
    double threshold_mass_g = 0.0;
    double kappa_star = 0.0;
    double density_g_cm3 = 0.0;
    std::vector<std::string> warnings;
};

namespace detail {
inline void warn_if_not_wide(const PhysicalScenario& s, std::vector<std::string>* warnings) {
    if (warnings && s.width_cm < 10.0 * s.radius_cm) {
        warnings->push_back("Lambda0 < 10 R: point-particle estimates are unreliable");
    }
}
} // namespace detail

/// Time-averaged relative kinetic energy from the virial relation, G M^2 / Lambda0.
inline double virial_energy(const PhysicalScenario& s, std::vector<std::string>* warnings = nullptr) {
    s.validate();
    detail::warn_if_not_wide(s, warnings);
    return s.constants.G * s.mass_g * s.mass_g / s.width_cm;
}

/// Phase-variation length of the relative factor: hbar sqrt(Lambda0 / (G M^3)).
inline double localization_length(const PhysicalScenario& s) {
    s.validate();
    const auto& c = s.constants;
    return c.hbar * std::sqrt(s.width_cm / (c.G * s.mass_g * s.mass_g * s.mass_g));
}

inline double branch_count(const PhysicalScenario& s) {
    const double ratio = s.width_cm / localization_length(s);
    return ratio * ratio * ratio;
}

/// Entropy of N equiprobable branches in units of k_B.
inline double branch_entropy(const PhysicalScenario& s) { return std::log(branch_count(s)); }

/// hbar Lambda0 / (G M^2).
inline double localization_time(const PhysicalScenario& s) {
    return s.constants.hbar / virial_energy(s);
}

/// Time for a free Gaussian of mass `mass_g` and position standard deviation
/// `sigma_cm` to widen by sqrt(2).
inline double spreading_time(double mass_g, double sigma_cm, double hbar) {
    if (!(mass_g > 0.0) || !(sigma_cm > 0.0) || !(hbar > 0.0)) {
        throw DomainError("spreading_time: arguments must be positive");
    }
    return 2.0 * mass_g * sigma_cm * sigma_cm / hbar;
}

/// Centre-of-mass spreading time: total mass 2M, sigma_cm = Lambda0 / (2 sqrt 2).
inline double spreading_time(const PhysicalScenario& s) {
    s.validate();
    const double sigma_cm = s.width_cm / (2.0 * std::numbers::sqrt2);
    return spreading_time(2.0 * s.mass_g, sigma_cm, s.constants.hbar);
}

/// Hydrogenic Bohr length of the relative motion: reduced mass M/2, coupling G M^2 / 2.
inline double hydrogenic_length(const PhysicalScenario& s) {
    s.validate();
    const auto& c = s.constants;
    return 4.0 * c.hbar * c.hbar / (c.G * s.mass_g * s.mass_g * s.mass_g);
}

inline double principal_quantum_number(const PhysicalScenario& s) {
    return std::sqrt(s.width_cm / hydrogenic_length(s));
}

/// <H_G> and its spread for the Gaussian meta-state.
///
/// In relative/sum coordinates D = X - Y, S = X + Y the state factorizes into
/// Gaussians exp(-D^2/2a^2) exp(-S^2/2a^2) (a = Lambda0) and
/// H_G = -(hbar^2/M) lap_S + [-(hbar^2/M) lap_D + V(|D|)].
/// The relative operator acting on its Gaussian gives g(r) * phi with
/// g(r) = -(hbar^2/M)(r^2/a^4 - 3/a^2) + V(r), so <h> and <h^2> reduce to
/// radial quadratures of g and g^2 against the Gaussian density; the S part
/// contributes 3 hbar^2/(2 M a^2) with variance 3 (hbar^2/M)^2 / (2 a^4).
inline GaussianEnergy gaussian_energy(const PhysicalScenario& s) {
    s.validate();
    const ScaledScenario sc = scale(s);
    const double a = sc.width;        // Lambda0 / R
    const double c = 1.0 / sc.kappa;  // hbar^2/M in units of eps R^2
    const double a2 = a * a;
    const double norm = 4.0 * std::numbers::pi / std::pow(std::numbers::pi * a2, 1.5);

    auto density = [&](double r) { return norm * r * r * std::exp(-r * r / a2); };
    auto g = [&](double r) { return -c * (r * r / (a2 * a2) - 3.0 / a2) + v_scaled(r); };

    auto integrate = [&](auto&& f) {
        // Breakpoints: contact kink of v, then the bulk of the Gaussian.
        std::vector<double> cuts{0.0, contact_separation};
        for (double x : {0.5 * a, a, 2.0 * a, 4.0 * a, 12.0 * a}) {
            if (x > cuts.back()) cuts.push_back(x);
        }
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            double err = 0.0;
            total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                f, cuts[i], cuts[i + 1], 15, 1e-13, &err);
            if (!std::isfinite(total)) throw NumericalError("gaussian_energy: quadrature diverged");
        }
        return total;
    };

    const double mass = integrate([&](double r) { return density(r); });
    if (std::abs(mass - 1.0) > 1e-9) throw NumericalError("gaussian_energy: density quadrature lost normalization");

    const double pot = integrate([&](double r) { return v_scaled(r) * density(r); });
    const double h1 = integrate([&](double r) { return g(r) * density(r); });
    const double h2 = integrate([&](double r) { return g(r) * g(r) * density(r); });

    const double ts_mean = c * 1.5 / a2;
    const double ts_var = c * c * 1.5 / (a2 * a2);
    const double var = std::max(0.0, h2 - h1 * h1) + ts_var;

    GaussianEnergy out;
    out.expect_erg = unscale_energy(h1 + ts_mean, sc);
    out.std_erg = unscale_energy(std::sqrt(var), sc);
    out.kinetic_erg = unscale_energy(2.0 * ts_mean, sc);
    out.potential_erg = unscale_energy(pot, sc);
    return out;
}

struct SampledPotential {
    double mean_erg = 0.0;
    double std_error_erg = 0.0;
    std::size_t samples = 0;
};

/// Sampled <V> for the Gaussian meta-state; a seeded cross-check of the
/// quadrature in gaussian_energy.
inline SampledPotential sample_potential(const PhysicalScenario& s, std::size_t samples, std::uint64_t seed) {
    s.validate();
    if (samples < 2) throw DomainError("sample_potential: need at least two samples");
    std::mt19937_64 rng(seed);
    // Relative coordinate D = X - Y: per-component standard deviation Lambda0 / sqrt 2.
    std::normal_distribution<double> normal(0.0, s.width_cm / std::numbers::sqrt2);
    const double eps = s.constants.G * s.mass_g * s.mass_g / s.radius_cm;
    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const double x = normal(rng), y = normal(rng), z = normal(rng);
        const double v = eps * v_scaled(std::sqrt(x * x + y * y + z * z) / s.radius_cm);
        // Welford update keeps the variance accurate for nearly constant samples.
        const double delta = v - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (v - mean);
    }
    SampledPotential out;
    out.mean_erg = mean;
    out.std_error_erg = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
    out.samples = samples;
    return out;
}

/// Mass whose coupling G M^3 R / hbar^2 equals kappa_star for a ball of the given density.
inline double threshold_mass(double density_g_cm3, double kappa_star, const Constants& c = {}) {
    if (!(density_g_cm3 > 0.0)) throw DomainError("threshold_mass: density must be positive");
    if (!(kappa_star > 0.0)) throw DomainError("threshold_mass: kappa_star must be positive");
    return std::pow(kappa_star * c.hbar * c.hbar / c.G, 0.3) *
           std::pow(4.0 * std::numbers::pi * density_g_cm3 / 3.0, 0.1);
}

inline EstimateReport estimate(const PhysicalScenario& s, double kappa_star = 1.0,
                               double density_g_cm3 = 1.0) {
    EstimateReport r;
    r.K_bar = virial_energy(s, &r.warnings);
    r.Lambda = localization_length(s);
    r.tau_loc = localization_time(s);
    r.N_branches = branch_count(s);
    r.entropy_over_kB = std::log(r.N_branches);
    r.t_spread = spreading_time(s);
    r.n_principal = principal_quantum_number(s);
    const auto e = gaussian_energy(s);
    r.H_G_expect = e.expect_erg;
    r.H_G_std = e.std_erg;
    r.H_G_kinetic = e.kinetic_erg;
    r.H_G_potential = e.potential_erg;
    r.kappa_star = kappa_star;
    r.density_g_cm3 = density_g_cm3;
    r.threshold_mass_g = threshold_mass(density_g_cm3, kappa_star, s.constants);
    return r;
}

} // namespace metagrav
