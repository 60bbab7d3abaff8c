#pragma once

// Halved mutual gravitational energy of two interpenetrating uniform balls
// of equal mass M and radius R, in units of GM^2/R as a function of the
// centre separation u = d/R.

#include <cmath>
#include <vector>

#include "metagrav/errors.hpp"
#include "metagrav/units.hpp"

namespace metagrav {

/// Separation at which the two balls stop overlapping.
inline constexpr double contact_separation = 2.0;

inline double v_scaled(double u) {
    if (!(u >= 0.0)) throw DomainError("v_scaled: separation must be non-negative");
    if (u <= contact_separation) {
        const double u2 = u * u;
        const double u3 = u2 * u;
        return -0.5 * (6.0 / 5.0 - 0.5 * u2 + 3.0 / 16.0 * u3 - u3 * u2 / 160.0);
    }
    return -0.5 / u;
}

/// dv/du; continuous at the contact separation (both sides give 1/8).
inline double dv_scaled(double u) {
    if (!(u >= 0.0)) throw DomainError("dv_scaled: separation must be non-negative");
    if (u <= contact_separation) {
        const double u2 = u * u;
        return -0.5 * (-u + 9.0 / 16.0 * u2 - u2 * u2 / 32.0);
    }
    return 0.5 / (u * u);
}

/// Energy of the deepest point, v(0) = -3/5.
inline double v_floor() { return v_scaled(0.0); }

/// Energy at contact, v(2) = -1/4. Relative-motion states below it are
/// classically confined to the overlap region.
inline double v_contact() { return v_scaled(contact_separation); }

/// Physical potential in erg at centre separation d (cm).
inline double V_physical(double d_cm, const PhysicalScenario& s) {
    s.validate();
    if (!(d_cm >= 0.0)) throw DomainError("V_physical: separation must be non-negative");
    const auto& c = s.constants;
    const double eps = c.G * s.mass_g * s.mass_g / s.radius_cm;
    return eps * v_scaled(d_cm / s.radius_cm);
}

/// Radial profile callable used by the propagators; the default is the gravity profile.
struct GravityProfile {
    double operator()(double u) const { return v_scaled(std::abs(u)); }
};

struct PotentialSample {
    double u;
    double v;
    double dv;
};

/// Uniform tabulation on [u_min, u_max], `points` >= 2.
inline std::vector<PotentialSample> tabulate_potential(double u_min, double u_max, std::size_t points) {
    if (points < 2) throw DomainError("tabulate_potential: need at least two points");
    if (!(u_min >= 0.0) || !(u_max > u_min)) throw DomainError("tabulate_potential: need 0 <= u_min < u_max");
    std::vector<PotentialSample> out;
    out.reserve(points);
    const double step = (u_max - u_min) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        const double u = u_min + step * static_cast<double>(i);
        out.push_back({u, v_scaled(u), dv_scaled(u)});
    }
    return out;
}

} // namespace metagrav
