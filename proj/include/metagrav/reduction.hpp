#pragma once

// Physical state of the ball: the hidden partner's coordinate is traced out
// of the meta-wavefunction, rho(x, x') = sum_y Xi(x, y) Xi*(x', y) h.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "metagrav/errors.hpp"
#include "metagrav/field.hpp"
#include "metagrav/propagator.hpp"

namespace metagrav {

/// Grid-sampled reduced state with sum_i rho(x_i, x_i) h = 1. The operator
/// spectrum (eigenvalues of rho * h) is computed once at construction.
class DensityMatrix {
public:
    DensityMatrix(Grid grid, Eigen::MatrixXcd rho) : grid_(grid), rho_(std::move(rho)) {
        const auto n = static_cast<Eigen::Index>(grid_.points());
        if (rho_.rows() != n || rho_.cols() != n) throw DataError("DensityMatrix: shape does not match grid");
        if (!rho_.allFinite()) throw DataError("DensityMatrix: non-finite entries");
        hermiticity_ = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
        const double scale = std::max(1.0, rho_.cwiseAbs().maxCoeff());
        if (hermiticity_ > 1e-8 * scale) throw DataError("DensityMatrix: matrix is not Hermitian");
        rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
        const double tr = trace();
        if (!(tr > 0.0)) throw DataError("DensityMatrix: non-positive trace");
        rho_ /= tr;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_ * grid_.spacing(), Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw NumericalError("DensityMatrix: eigen-decomposition failed");
        const auto& ev = es.eigenvalues();
        eigenvalues_.assign(ev.data(), ev.data() + ev.size());
    }

    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] const Eigen::MatrixXcd& matrix() const { return rho_; }
    [[nodiscard]] cplx operator()(std::size_t i, std::size_t j) const {
        return rho_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    /// sum_i rho_ii h.
    [[nodiscard]] double trace() const { return rho_.diagonal().real().sum() * grid_.spacing(); }
    /// max |rho - rho^dagger| of the input before symmetrization.
    [[nodiscard]] double hermiticity_error() const { return hermiticity_; }
    /// Operator eigenvalues, ascending.
    [[nodiscard]] const std::vector<double>& eigenvalues() const { return eigenvalues_; }
    [[nodiscard]] double min_eigenvalue() const { return eigenvalues_.front(); }

    /// Probability density rho(x_i, x_i).
    [[nodiscard]] std::vector<double> diagonal() const {
        std::vector<double> d(grid_.points());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = (*this)(i, i).real();
        return d;
    }

    /// Hermitian to 1e-12, PSD to -1e-10, unit trace to 1e-10.
    [[nodiscard]] bool valid() const {
        return hermiticity_ <= 1e-12 * std::max(1.0, rho_.cwiseAbs().maxCoeff()) && min_eigenvalue() >= -1e-10 &&
               std::abs(trace() - 1.0) <= 1e-10;
    }

private:
    Grid grid_;
    Eigen::MatrixXcd rho_;
    double hermiticity_ = 0.0;
    std::vector<double> eigenvalues_;
};

/// Traces out the second (hidden) coordinate of Xi(x, y).
inline DensityMatrix partial_trace(const Field2D& xi) {
    if (!xi.finite()) throw DataError("partial_trace: non-finite amplitudes");
    const auto n = static_cast<Eigen::Index>(xi.points());
    using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMajor> m(xi.data().data(), n, n);
    Eigen::MatrixXcd rho(n, n);
    rho.noalias() = m * m.adjoint();
    rho *= xi.grid().spacing();
    return DensityMatrix(xi.grid(), std::move(rho));
}

inline constexpr double entropy_cutoff = 1e-14;

/// -sum lambda ln lambda over eigenvalues above the cutoff, in nats.
inline double von_neumann_entropy(const DensityMatrix& rho) {
    double s = 0.0;
    for (double l : rho.eigenvalues()) {
        if (l > entropy_cutoff) s -= l * std::log(l);
    }
    return s;
}

/// Tr rho^2.
inline double purity(const DensityMatrix& rho) {
    double p = 0.0;
    for (double l : rho.eigenvalues()) p += l * l;
    return p;
}

/// Standard deviation of the position distribution rho(x, x).
inline double diagonal_width(const DensityMatrix& rho) {
    const auto d = rho.diagonal();
    const auto& g = rho.grid();
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double x = g.coord(i);
        m0 += d[i];
        m1 += d[i] * x;
        m2 += d[i] * x * x;
    }
    const double mean = m1 / m0;
    return std::sqrt(std::max(0.0, m2 / m0 - mean * mean));
}

struct CoherenceProfile {
    std::vector<double> separation; // s = |x - x'|
    std::vector<double> value;      // C(s)
};

struct CoherenceResult {
    double length = 0.0; // s* where C first drops below C(0)/2
    bool decayed = false; // false: never dropped; length is the box extent
    CoherenceProfile profile;
};

/// C(s): mean of |rho(xbar + s/2, xbar - s/2)| over xbar, weighted by the
/// position density at the midpoint xbar.
inline CoherenceProfile coherence_profile(const DensityMatrix& rho) {
    const auto n = rho.grid().points();
    const auto d = rho.diagonal();
    CoherenceProfile p;
    p.separation.resize(n);
    p.value.resize(n);
    for (std::size_t m = 0; m < n; ++m) {
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j + m < n; ++j) {
            const std::size_t i = j + m;
            const std::size_t c = j + m / 2;
            const double w = (m % 2 == 0) ? d[c] : 0.5 * (d[c] + d[c + 1]);
            num += w * std::abs(rho(i, j));
            den += w;
        }
        p.separation[m] = static_cast<double>(m) * rho.grid().spacing();
        p.value[m] = den > 0.0 ? num / den : 0.0;
    }
    return p;
}

inline CoherenceResult coherence_length(const DensityMatrix& rho) {
    CoherenceResult r;
    r.profile = coherence_profile(rho);
    const auto& c = r.profile.value;
    const double half = 0.5 * c[0];
    for (std::size_t m = 1; m < c.size(); ++m) {
        if (c[m] < half) {
            const double frac = (c[m - 1] - half) / (c[m - 1] - c[m]);
            r.length = (static_cast<double>(m - 1) + frac) * rho.grid().spacing();
            r.decayed = true;
            return r;
        }
    }
    r.length = rho.grid().extent();
    r.decayed = false;
    return r;
}

struct Branch {
    double weight = 0.0; // eigenvalue
    double centre = 0.0;
    double width = 0.0;  // position standard deviation of the eigenvector
};

/// The `count` most probable eigenvectors of rho with their localization widths.
inline std::vector<Branch> branch_widths(const DensityMatrix& rho, std::size_t count) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix() * rho.grid().spacing());
    if (es.info() != Eigen::Success) throw NumericalError("branch_widths: eigen-decomposition failed");
    const auto n = static_cast<std::size_t>(es.eigenvalues().size());
    std::vector<Branch> out;
    for (std::size_t k = 0; k < std::min(count, n); ++k) {
        const auto col = static_cast<Eigen::Index>(n - 1 - k);
        Branch b;
        b.weight = es.eigenvalues()(col);
        double m0 = 0.0, m1 = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double p = std::norm(es.eigenvectors()(static_cast<Eigen::Index>(i), col));
            const double x = rho.grid().coord(i);
            m0 += p;
            m1 += p * x;
            m2 += p * x * x;
        }
        b.centre = m1 / m0;
        b.width = std::sqrt(std::max(0.0, m2 / m0 - b.centre * b.centre));
        out.push_back(b);
    }
    return out;
}

/// Meta-energy expectation and spread of Xi under H.
inline EnergyStats physical_energy(const Field2D& xi, const Hamiltonian<2>& h) {
    if (!xi.finite()) throw DataError("physical_energy: non-finite amplitudes");
    return h.energy(xi);
}

} // namespace metagrav
