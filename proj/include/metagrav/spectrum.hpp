#pragma once

// s-wave bound states of the relative motion,
//
//   -(1/kappa) u'' + v(r) u = e u,   u(0) = 0,  u(u_max) = 0,
//
// by Numerov integration and node-counting bisection (Sturm oscillation:
// the outward solution at energy e has as many nodes as there are
// eigenvalues below e).

#include <algorithm>
#include <cmath>
#include <vector>

#include "metagrav/errors.hpp"
#include "metagrav/potential.hpp"
#include "metagrav/propagator.hpp"

namespace metagrav {

struct ShootOptions {
    double step = 2e-3;       // must divide the contact separation so a node sits on the kink
    double u_max = 0.0;       // 0 selects auto_u_max
    double energy_tol = 1e-11;
};

struct SpectrumResult {
    double kappa = 0.0;
    double u_max = 0.0;
    double step = 0.0;
    std::vector<double> eigenvalues; // ascending
    std::vector<int> nodes;          // radial nodes of each state
};

/// Outer wall far enough that a level at e_top has decayed: turning point
/// of the -1/(2u) tail plus 40 decay lengths, and never below 40.
inline double auto_u_max(double kappa, double e_top) {
    if (!(e_top < 0.0)) throw DomainError("auto_u_max: upper energy must be negative");
    const double turn = 0.5 / std::abs(e_top);
    return std::max(40.0, 2.0 * turn + 40.0 / std::sqrt(kappa * std::abs(e_top)));
}

class RadialShooter {
public:
    RadialShooter(double kappa, double u_max, double step, const RadialProfile& profile = GravityProfile{})
        : kappa_(kappa), step_(step) {
        if (!(kappa > 0.0)) throw DomainError("radial_shoot: kappa must be positive");
        if (!(step > 0.0) || !(u_max > 10.0 * step)) throw DomainError("radial_shoot: bad step or u_max");
        const auto n = static_cast<std::size_t>(std::ceil(u_max / step));
        u_max_ = static_cast<double>(n) * step;
        v_.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) v_[i] = profile(static_cast<double>(i) * step);
    }

    [[nodiscard]] double u_max() const { return u_max_; }
    [[nodiscard]] double step() const { return step_; }
    [[nodiscard]] double kappa() const { return kappa_; }

    /// Nodes of the outward solution in (0, u_max]; equals the number of eigenvalues below e.
    [[nodiscard]] int count_nodes(double e) const {
        int nodes = 0;
        integrate_outward(e, v_.size() - 1, [&](std::size_t, double prev, double cur) {
            if ((prev > 0.0 && cur <= 0.0) || (prev < 0.0 && cur >= 0.0)) ++nodes;
        });
        return nodes;
    }

    /// Eigenvalue with exactly `index` nodes, searched in [e_lo, e_hi].
    [[nodiscard]] double eigenvalue(int index, double e_lo, double e_hi, double tol) const {
        if (count_nodes(e_lo) > index || count_nodes(e_hi) <= index) {
            throw NumericalError("radial_shoot: level not bracketed");
        }
        while (e_hi - e_lo > tol) {
            const double mid = 0.5 * (e_lo + e_hi);
            if (count_nodes(mid) > index) e_hi = mid;
            else e_lo = mid;
        }
        return 0.5 * (e_lo + e_hi);
    }

    /// u(r) at an eigenvalue, matched outward/inward at the outer turning
    /// point and normalized to int u^2 dr = 1. Sample i sits at r = i * step.
    [[nodiscard]] std::vector<double> eigenfunction(double e) const {
        const std::size_t n = v_.size() - 1;
        std::size_t match = n / 2;
        for (std::size_t i = n; i > 0; --i) {
            if (v_[i] < e) {
                match = i;
                break;
            }
        }
        match = std::clamp<std::size_t>(match, 2, n - 2);

        std::vector<double> out(n + 1, 0.0);
        integrate_outward(e, match, [&](std::size_t i, double, double cur) { out[i] = cur; });
        const double left = out[match];

        std::vector<double> in(n + 1, 0.0);
        const double h2 = step_ * step_ / 12.0;
        auto f = [&](std::size_t i) { return kappa_ * (v_[i] - e); };
        in[n] = 0.0;
        in[n - 1] = 1e-300;
        for (std::size_t i = n - 1; i > match; --i) {
            const double y = (2.0 * in[i] * (1.0 + 5.0 * h2 * f(i)) - in[i + 1] * (1.0 - h2 * f(i + 1))) /
                             (1.0 - h2 * f(i - 1));
            in[i - 1] = y;
            if (std::abs(y) > 1e250) {
                for (std::size_t k = i - 1; k <= n; ++k) in[k] *= 1e-250;
            }
        }
        if (in[match] == 0.0 || left == 0.0) throw NumericalError("radial eigenfunction: degenerate matching");
        const double scale = left / in[match];
        for (std::size_t i = match + 1; i <= n; ++i) out[i] = in[i] * scale;

        double norm = 0.0;
        for (std::size_t i = 0; i <= n; ++i) norm += out[i] * out[i];
        norm = std::sqrt(norm * step_);
        for (auto& y : out) y /= norm;
        if (out[1] < 0.0) {
            for (auto& y : out) y = -y;
        }
        return out;
    }

private:
    template <typename Visit>
    void integrate_outward(double e, std::size_t last, Visit&& visit) const {
        const double h2 = step_ * step_ / 12.0;
        auto f = [&](std::size_t i) { return kappa_ * (v_[i] - e); };
        double y_prev = 0.0;
        double y = step_;
        visit(0, 0.0, 0.0);
        visit(1, y_prev, y);
        double w_prev = 1.0 - h2 * f(0);
        double w = 1.0 - h2 * f(1);
        for (std::size_t i = 1; i < last; ++i) {
            const double w_next = 1.0 - h2 * f(i + 1);
            const double y_next = (2.0 * y * (1.0 + 5.0 * h2 * f(i)) - y_prev * w_prev) / w_next;
            visit(i + 1, y, y_next);
            y_prev = y;
            y = y_next;
            w_prev = w;
            w = w_next;
            if (std::abs(y) > 1e250) {
                y *= 1e-250;
                y_prev *= 1e-250;
            }
        }
    }

    double kappa_;
    double step_;
    double u_max_ = 0.0;
    std::vector<double> v_;
};

/// All s-wave eigenvalues in [e_lo, e_hi) (e_hi < 0), ascending.
inline SpectrumResult radial_shoot(double kappa, double e_lo, double e_hi, const ShootOptions& opts = {},
                                   const RadialProfile& profile = GravityProfile{}) {
    if (!(e_lo < e_hi)) throw DomainError("radial_shoot: empty energy range");
    const double u_max = opts.u_max > 0.0 ? opts.u_max : auto_u_max(kappa, e_hi);
    RadialShooter shooter(kappa, u_max, opts.step, profile);
    SpectrumResult res;
    res.kappa = kappa;
    res.u_max = shooter.u_max();
    res.step = shooter.step();
    const int first = shooter.count_nodes(e_lo);
    const int last = shooter.count_nodes(e_hi);
    for (int k = first; k < last; ++k) {
        const double lo = res.eigenvalues.empty() ? e_lo : res.eigenvalues.back();
        res.eigenvalues.push_back(shooter.eigenvalue(k, lo, e_hi, opts.energy_tol));
        res.nodes.push_back(k);
    }
    return res;
}

/// Default window: from the potential floor up to the given negative energy.
inline SpectrumResult radial_shoot(double kappa, double e_top = -5e-3, const ShootOptions& opts = {}) {
    return radial_shoot(kappa, v_floor(), e_top, opts);
}

inline int count_levels_below(double kappa, double e, const ShootOptions& opts = {}) {
    const double u_max = opts.u_max > 0.0 ? opts.u_max : auto_u_max(kappa, std::min(e, -1e-3));
    return RadialShooter(kappa, u_max, opts.step).count_nodes(e);
}

struct ThresholdOptions {
    /// A level below this energy counts as self-localized: the relative motion
    /// is classically confined inside the overlap region u < 2.
    double binding_level = -0.25;
    double kappa_lo = 0.05;
    double kappa_hi = 1e4;
    double rel_tol = 1e-7;
    ShootOptions shoot{};
};

/// Smallest kappa with a bound level below `binding_level`, by bisection in log kappa.
inline double threshold_kappa(const ThresholdOptions& opts = {}) {
    auto has_level = [&](double k) { return count_levels_below(k, opts.binding_level, opts.shoot) >= 1; };
    double lo = opts.kappa_lo;
    double hi = opts.kappa_hi;
    if (has_level(lo) || !has_level(hi)) throw NumericalError("threshold_kappa: threshold not bracketed");
    while (hi / lo - 1.0 > opts.rel_tol) {
        const double mid = std::sqrt(lo * hi);
        if (has_level(mid)) hi = mid;
        else lo = mid;
    }
    return std::sqrt(lo * hi);
}

/// Hydrogenic s-level of the -1/(2u) tail with reduced scaled mass kappa/2.
inline double hydrogenic_level(double kappa, double n) { return -kappa / (16.0 * n * n); }

/// Orbit radius 4 n^2 / kappa of hydrogenic level n.
inline double hydrogenic_radius(double kappa, double n) { return 4.0 * n * n / kappa; }

struct HydrogenicLevel {
    int level = 0;            // 1-based index in the computed spectrum
    double energy = 0.0;
    double effective_n = 0.0; // sqrt(kappa / (16 |e|))
    double defect = 0.0;      // effective_n - level
    int label = 0;            // hydrogenic principal number after the core offset
    double hydrogenic = 0.0;  // -kappa / (16 label^2)
    double rel_deviation = 0.0;
};

/// Compares computed levels with the hydrogenic series. The soft core
/// removes the deepest hydrogenic s-levels, so level k corresponds to
/// principal number k + round(defect), with the defect taken from the
/// highest computed level where it has settled.
inline std::vector<HydrogenicLevel> hydrogenic_comparison(const SpectrumResult& spec) {
    std::vector<HydrogenicLevel> out;
    if (spec.eigenvalues.empty()) return out;
    const double e_last = spec.eigenvalues.back();
    const double n_last = std::sqrt(spec.kappa / (16.0 * std::abs(e_last)));
    const int offset = static_cast<int>(std::lround(n_last - static_cast<double>(spec.eigenvalues.size())));
    for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k) {
        HydrogenicLevel h;
        h.level = static_cast<int>(k) + 1;
        h.energy = spec.eigenvalues[k];
        h.effective_n = std::sqrt(spec.kappa / (16.0 * std::abs(h.energy)));
        h.defect = h.effective_n - h.level;
        h.label = h.level + offset;
        h.hydrogenic = hydrogenic_level(spec.kappa, h.label);
        h.rel_deviation = std::abs(h.energy / h.hydrogenic - 1.0);
        out.push_back(h);
    }
    return out;
}

} // namespace metagrav
