#pragma once

// Reference for the interpenetrating-sphere potential: half the mutual
// Newtonian energy of two unit-mass, unit-radius uniform balls at centre
// separation u (G = 1), by direct quadrature of the potential of ball 1
// over the volume of ball 2. The axial symmetry leaves a 2D integral over
// the radius s and polar cosine c within ball 2.

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

/// Potential of a unit uniform ball at distance r from its centre.
inline double ball_potential(double r) { return r <= 1.0 ? -0.5 * (3.0 - r * r) : -1.0 / r; }

inline double v_oracle(double u) {
    using boost::math::quadrature::gauss_kronrod;
    auto shell = [u](double s) {
        // Integral over c of the potential on a shell of ball 2; split where r = 1.
        auto f = [u, s](double c) { return ball_potential(std::sqrt(std::max(0.0, u * u + s * s + 2.0 * u * s * c))); };
        std::vector<double> cuts{-1.0};
        if (u > 0.0 && s > 0.0) {
            const double c_star = (1.0 - u * u - s * s) / (2.0 * u * s);
            if (c_star > -1.0 && c_star < 1.0) cuts.push_back(c_star);
        }
        cuts.push_back(1.0);
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            sum += gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 12, 1e-13);
        }
        return s * s * sum;
    };
    std::vector<double> cuts{0.0};
    if (std::abs(1.0 - u) > 0.0 && std::abs(1.0 - u) < 1.0) cuts.push_back(std::abs(1.0 - u));
    cuts.push_back(1.0);
    double w = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        w += gauss_kronrod<double, 31>::integrate(shell, cuts[i], cuts[i + 1], 12, 1e-12);
    }
    // Density 3/(4 pi), azimuth 2 pi.
    const double mutual = 1.5 * w;
    return 0.5 * mutual;
}

} // namespace oracle
