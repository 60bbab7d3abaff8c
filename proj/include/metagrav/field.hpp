#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "metagrav/errors.hpp"

namespace metagrav {

using cplx = std::complex<double>;

/// Uniform periodic axis centred at 0: x_i = (i - n/2) h, h = extent / n.
class Grid {
public:
    Grid() = default;
    Grid(double extent, std::size_t points) : extent_(extent), points_(points) {
        if (!(extent > 0.0) || !std::isfinite(extent)) throw DomainError("Grid: extent must be positive");
        if (points < 8 || !std::has_single_bit(points)) {
            throw DomainError("Grid: point count must be a power of two >= 8");
        }
    }

    [[nodiscard]] double extent() const { return extent_; }
    [[nodiscard]] std::size_t points() const { return points_; }
    [[nodiscard]] double spacing() const { return extent_ / static_cast<double>(points_); }
    [[nodiscard]] double coord(std::size_t i) const {
        return (static_cast<double>(i) - static_cast<double>(points_ / 2)) * spacing();
    }
    /// Index of x -> -x on the periodic grid.
    [[nodiscard]] std::size_t mirror(std::size_t i) const { return (points_ - i) % points_; }

    /// Angular wavenumber of FFT bin i (standard FFT ordering).
    [[nodiscard]] double wavenumber(std::size_t i) const {
        const auto n = static_cast<std::ptrdiff_t>(points_);
        auto k = static_cast<std::ptrdiff_t>(i);
        if (k >= n / 2) k -= n;
        return 2.0 * std::numbers::pi * static_cast<double>(k) / extent_;
    }
    [[nodiscard]] double nyquist() const { return std::numbers::pi / spacing(); }

    bool operator==(const Grid&) const = default;

private:
    double extent_ = 1.0;
    std::size_t points_ = 8;
};

/// Complex amplitudes on a Dim-dimensional tensor grid with the same axis
/// in every direction. Storage is row-major: index = i * n + j in 2D.
template <std::size_t Dim>
class Field {
    static_assert(Dim == 1 || Dim == 2, "Field supports one or two dimensions");

public:
    Field() = default;
    explicit Field(Grid grid) : grid_(grid), amp_(total_points(grid), cplx{}) {}

    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] std::size_t size() const { return amp_.size(); }
    [[nodiscard]] std::size_t points() const { return grid_.points(); }
    [[nodiscard]] double cell_volume() const { return std::pow(grid_.spacing(), static_cast<double>(Dim)); }

    [[nodiscard]] std::span<cplx> data() { return amp_; }
    [[nodiscard]] std::span<const cplx> data() const { return amp_; }

    cplx& operator[](std::size_t k) { return amp_[k]; }
    const cplx& operator[](std::size_t k) const { return amp_[k]; }

    cplx& operator()(std::size_t i) requires(Dim == 1) { return amp_[i]; }
    const cplx& operator()(std::size_t i) const requires(Dim == 1) { return amp_[i]; }
    cplx& operator()(std::size_t i, std::size_t j) requires(Dim == 2) { return amp_[i * grid_.points() + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const requires(Dim == 2) {
        return amp_[i * grid_.points() + j];
    }

    [[nodiscard]] double norm2() const {
        double s = 0.0;
        for (const auto& a : amp_) s += std::norm(a);
        return s * cell_volume();
    }

    [[nodiscard]] bool finite() const {
        for (const auto& a : amp_) {
            if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
        }
        return true;
    }

    void normalize() {
        const double n2 = norm2();
        if (!(n2 > 0.0) || !std::isfinite(n2)) throw DataError("Field: cannot normalize a zero or non-finite field");
        const double f = 1.0 / std::sqrt(n2);
        for (auto& a : amp_) a *= f;
    }

    /// <this|other> with the grid measure.
    [[nodiscard]] cplx inner(const Field& other) const {
        if (!(other.grid_ == grid_)) throw DataError("Field::inner: grids differ");
        cplx s{};
        for (std::size_t k = 0; k < amp_.size(); ++k) s += std::conj(amp_[k]) * other.amp_[k];
        return s * cell_volume();
    }

private:
    static std::size_t total_points(const Grid& g) {
        std::size_t n = 1;
        for (std::size_t d = 0; d < Dim; ++d) n *= g.points();
        return n;
    }

    Grid grid_{};
    std::vector<cplx> amp_;
};

using Field1D = Field<1>;
using Field2D = Field<2>;

/// |<a|b>|^2 / (<a|a><b|b>).
template <std::size_t Dim>
double fidelity(const Field<Dim>& a, const Field<Dim>& b) {
    return std::norm(a.inner(b)) / (a.norm2() * b.norm2());
}

/// Fill a field from f(x) or f(x, y) evaluated at grid nodes.
template <typename F>
Field1D sample(const Grid& g, F&& f) {
    Field1D out(g);
    for (std::size_t i = 0; i < g.points(); ++i) out(i) = f(g.coord(i));
    return out;
}

template <typename F>
Field2D sample2d(const Grid& g, F&& f) {
    Field2D out(g);
    const auto n = g.points();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out(i, j) = f(g.coord(i), g.coord(j));
    }
    return out;
}

} // namespace metagrav
