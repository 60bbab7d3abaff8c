#pragma once

// Physical (CGS) scenario of a uniform matter ball and the single-coupling
// dimensionless form the dynamics runs in. Lengths are measured in R,
// energies in GM^2/R and times in hbar R / (G M^2), which turns the
// meta-Schroedinger equation into
//
//   i d/dt Xi = [ -(1/2 kappa) (lap_x + lap_y) + v(|x - y|) ] Xi,
//   kappa = G M^3 R / hbar^2.

#include <cmath>
#include <string>

#include "metagrav/config.hpp"
#include "metagrav/errors.hpp"

namespace metagrav {

/// CODATA 2018 values in CGS.
struct Constants {
    double G = 6.67430e-8;        // cm^3 g^-1 s^-2
    double hbar = 1.054571817e-27; // erg s
    double k_B = 1.380649e-16;    // erg / K
};

inline constexpr double proton_mass_g = 1.67262192369e-24;

struct PhysicalScenario {
    double mass_g = 0.0;
    double radius_cm = 0.0;
    double width_cm = 0.0; // Lambda_0, initial Gaussian width parameter
    Constants constants{};

    void validate() const {
        auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
        if (!positive(mass_g)) throw DomainError("scenario: mass must be positive");
        if (!positive(radius_cm)) throw DomainError("scenario: radius must be positive");
        if (!positive(width_cm)) throw DomainError("scenario: initial width must be positive");
        if (!positive(constants.G) || !positive(constants.hbar) || !positive(constants.k_B)) {
            throw DomainError("scenario: physical constants must be positive");
        }
    }

    /// The scenario from the numerical example: M = 1e-9 g, R = 1e-3 cm, Lambda_0 = 0.1 cm.
    static PhysicalScenario reference() { return {1e-9, 1e-3, 1e-1, {}}; }

    /// Keys: mass_g, radius_cm, width_cm; optional G, hbar, k_B overrides.
    static PhysicalScenario from_config(const KeyValueConfig& cfg) {
        PhysicalScenario s;
        s.mass_g = cfg.require_double("mass_g");
        s.radius_cm = cfg.require_double("radius_cm");
        s.width_cm = cfg.require_double("width_cm");
        s.constants.G = cfg.get_double("G", s.constants.G);
        s.constants.hbar = cfg.get_double("hbar", s.constants.hbar);
        s.constants.k_B = cfg.get_double("k_B", s.constants.k_B);
        s.validate();
        return s;
    }
};

struct ScaledScenario {
    double kappa = 0.0;
    double length_unit_cm = 0.0;  // R
    double energy_unit_erg = 0.0; // G M^2 / R
    double time_unit_s = 0.0;     // hbar / energy_unit

    /// Initial width Lambda_0 / R of the owning scenario (0 when built directly from kappa).
    double width = 0.0;
};

inline ScaledScenario scale(const PhysicalScenario& s) {
    s.validate();
    const auto& c = s.constants;
    ScaledScenario out;
    out.kappa = c.G * s.mass_g * s.mass_g * s.mass_g * s.radius_cm / (c.hbar * c.hbar);
    out.length_unit_cm = s.radius_cm;
    out.energy_unit_erg = c.G * s.mass_g * s.mass_g / s.radius_cm;
    out.time_unit_s = c.hbar / out.energy_unit_erg;
    out.width = s.width_cm / s.radius_cm;
    return out;
}

inline double unscale_length(double x, const ScaledScenario& s) { return x * s.length_unit_cm; }
inline double unscale_energy(double e, const ScaledScenario& s) { return e * s.energy_unit_erg; }
inline double unscale_time(double t, const ScaledScenario& s) { return t * s.time_unit_s; }

inline double scale_length(double cm, const ScaledScenario& s) { return cm / s.length_unit_cm; }
inline double scale_energy(double erg, const ScaledScenario& s) { return erg / s.energy_unit_erg; }
inline double scale_time(double sec, const ScaledScenario& s) { return sec / s.time_unit_s; }

} // namespace metagrav
