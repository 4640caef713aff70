#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <new>
#include <vector>

#include <fftw3.h>

#include "sgsim/error.hpp"

namespace sgsim {

using cplx = std::complex<double>;

/// Allocator that hands out FFTW-aligned storage so plans can be reused on any buffer.
template <class T>
struct FftwAllocator
{
    using value_type = T;

    FftwAllocator() = default;
    template <class U>
    FftwAllocator(const FftwAllocator<U>&) noexcept
    {
    }

    T* allocate(std::size_t n)
    {
        void* p = fftw_malloc(n * sizeof(T));
        if (!p)
            throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }

    template <class U>
    bool operator==(const FftwAllocator<U>&) const noexcept
    {
        return true;
    }
};

using CVector = std::vector<cplx, FftwAllocator<cplx>>;

namespace detail {
// The FFTW planner is not thread safe; execution is.
inline std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

inline fftw_complex* as_fftw(cplx* p)
{
    return reinterpret_cast<fftw_complex*>(p);
}
} // namespace detail

/// Batched in-place 2D complex transforms of `count` contiguous n x n arrays.
class FftPlan2D
{
  public:
    FftPlan2D(std::size_t n, int count, unsigned flags = FFTW_MEASURE) : n_(n), count_(count)
    {
        detail::require(n >= 2, "FftPlan2D: n must be >= 2");
        CVector scratch(n * n * static_cast<std::size_t>(count));
        const int dims[2] = {static_cast<int>(n), static_cast<int>(n)};
        const int dist = static_cast<int>(n * n);
        std::lock_guard lock(detail::planner_mutex());
        auto* p = detail::as_fftw(scratch.data());
        forward_ = fftw_plan_many_dft(2, dims, count, p, nullptr, 1, dist, p, nullptr, 1, dist, FFTW_FORWARD, flags);
        backward_ = fftw_plan_many_dft(2, dims, count, p, nullptr, 1, dist, p, nullptr, 1, dist, FFTW_BACKWARD, flags);
        if (!forward_ || !backward_)
            throw EngineError("FFTW failed to create a 2D plan");
    }
    FftPlan2D(const FftPlan2D&) = delete;
    FftPlan2D& operator=(const FftPlan2D&) = delete;
    ~FftPlan2D()
    {
        std::lock_guard lock(detail::planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    void forward(CVector& data) const { fftw_execute_dft(forward_, ptr(data), ptr(data)); }
    /// Unnormalized inverse (scales by n^2).
    void backward(CVector& data) const { fftw_execute_dft(backward_, ptr(data), ptr(data)); }

    std::size_t size() const { return n_; }

  private:
    fftw_complex* ptr(CVector& data) const
    {
        detail::require(data.size() == n_ * n_ * static_cast<std::size_t>(count_), "FftPlan2D: buffer size mismatch");
        return detail::as_fftw(data.data());
    }

    std::size_t n_;
    int count_;
    fftw_plan forward_{nullptr};
    fftw_plan backward_{nullptr};
};

/// In-place 1D complex transform of length n.
class FftPlan1D
{
  public:
    explicit FftPlan1D(std::size_t n, unsigned flags = FFTW_ESTIMATE) : n_(n)
    {
        detail::require(n >= 2, "FftPlan1D: n must be >= 2");
        CVector scratch(n);
        std::lock_guard lock(detail::planner_mutex());
        auto* p = detail::as_fftw(scratch.data());
        forward_ = fftw_plan_dft_1d(static_cast<int>(n), p, p, FFTW_FORWARD, flags);
        backward_ = fftw_plan_dft_1d(static_cast<int>(n), p, p, FFTW_BACKWARD, flags);
        if (!forward_ || !backward_)
            throw EngineError("FFTW failed to create a 1D plan");
    }
    FftPlan1D(const FftPlan1D&) = delete;
    FftPlan1D& operator=(const FftPlan1D&) = delete;
    ~FftPlan1D()
    {
        std::lock_guard lock(detail::planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    void forward(CVector& data) const { fftw_execute_dft(forward_, ptr(data), ptr(data)); }
    void backward(CVector& data) const { fftw_execute_dft(backward_, ptr(data), ptr(data)); }

  private:
    fftw_complex* ptr(CVector& data) const
    {
        detail::require(data.size() == n_, "FftPlan1D: buffer size mismatch");
        return detail::as_fftw(data.data());
    }

    std::size_t n_;
    fftw_plan forward_{nullptr};
    fftw_plan backward_{nullptr};
};

/// Angular wavenumber of FFT bin m on a periodic grid of n points with spacing delta.
/// The Nyquist bin is mapped to -pi/delta.
inline double fft_wavenumber(std::size_t m, std::size_t n, double delta)
{
    const auto sm = static_cast<long long>(m);
    const auto sn = static_cast<long long>(n);
    const long long k = sm < (sn + 1) / 2 ? sm : sm - sn;
    return 2.0 * std::numbers::pi * static_cast<double>(k) / (static_cast<double>(n) * delta);
}

} // namespace sgsim
