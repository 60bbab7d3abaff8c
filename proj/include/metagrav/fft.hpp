#pragma once

#include <mutex>
#include <span>

#include <fftw3.h>

#include "metagrav/errors.hpp"
#include "metagrav/field.hpp"

namespace metagrav {

namespace detail {
/// FFTW's planner is not thread-safe; execution of an existing plan is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

/// In-place forward/inverse DFT over a Dim-dimensional square grid.
/// Plans use FFTW_ESTIMATE so results are reproducible run to run.
/// The inverse is normalized: inverse(forward(f)) == f.
template <std::size_t Dim>
class FftPlan {
public:
    explicit FftPlan(std::size_t points) : points_(points) {
        int dims[2] = {static_cast<int>(points), static_cast<int>(points)};
        total_ = 1;
        for (std::size_t d = 0; d < Dim; ++d) total_ *= points;

        std::lock_guard lock(detail::fftw_planner_mutex());
        auto* scratch = fftw_alloc_complex(total_);
        if (!scratch) throw NumericalError("FftPlan: allocation failed");
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward_ = fftw_plan_dft(static_cast<int>(Dim), dims, scratch, scratch, FFTW_FORWARD, flags);
        backward_ = fftw_plan_dft(static_cast<int>(Dim), dims, scratch, scratch, FFTW_BACKWARD, flags);
        fftw_free(scratch);
        if (!forward_ || !backward_) throw NumericalError("FftPlan: FFTW planning failed");
    }

    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    FftPlan(FftPlan&& o) noexcept : points_(o.points_), total_(o.total_), forward_(o.forward_), backward_(o.backward_) {
        o.forward_ = nullptr;
        o.backward_ = nullptr;
    }
    FftPlan& operator=(FftPlan&&) = delete;

    ~FftPlan() {
        std::lock_guard lock(detail::fftw_planner_mutex());
        if (forward_) fftw_destroy_plan(forward_);
        if (backward_) fftw_destroy_plan(backward_);
    }

    void forward(std::span<cplx> data) const {
        check(data);
        auto* p = reinterpret_cast<fftw_complex*>(data.data());
        fftw_execute_dft(forward_, p, p);
    }

    void inverse(std::span<cplx> data) const {
        check(data);
        auto* p = reinterpret_cast<fftw_complex*>(data.data());
        fftw_execute_dft(backward_, p, p);
        const double inv = 1.0 / static_cast<double>(total_);
        for (auto& a : data) a *= inv;
    }

    [[nodiscard]] std::size_t points() const { return points_; }

private:
    void check(std::span<cplx> data) const {
        if (data.size() != total_) throw DataError("FftPlan: buffer size does not match plan");
    }

    std::size_t points_;
    std::size_t total_ = 0;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

} // namespace metagrav
