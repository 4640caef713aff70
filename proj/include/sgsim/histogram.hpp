#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "sgsim/error.hpp"

namespace sgsim {

/// 2D binned weights over (vx, vz), row-major with vz as the slow index.
struct HistogramGrid
{
    std::size_t nx{0};
    std::size_t nz{0};
    double x_lo{0.0};
    double x_hi{0.0};
    double z_lo{0.0};
    double z_hi{0.0};
    std::string unit{"v_star"}; ///< axis unit: v_star, or v0 for reduced-scale runs
    std::vector<double> values;
    double overflow{0.0}; ///< weight that fell outside the axis ranges

    static HistogramGrid symmetric(std::size_t bins, double range, std::string unit = "v_star")
    {
        detail::require(bins >= 2, "histogram: bins must be >= 2");
        detail::require(range > 0.0, "histogram: range must be > 0");
        HistogramGrid h;
        h.nx = h.nz = bins;
        h.x_lo = h.z_lo = -range;
        h.x_hi = h.z_hi = range;
        h.unit = std::move(unit);
        h.values.assign(bins * bins, 0.0);
        return h;
    }

    double dx() const { return (x_hi - x_lo) / static_cast<double>(nx); }
    double dz() const { return (z_hi - z_lo) / static_cast<double>(nz); }
    double x_center(std::size_t ix) const { return x_lo + (static_cast<double>(ix) + 0.5) * dx(); }
    double z_center(std::size_t iz) const { return z_lo + (static_cast<double>(iz) + 0.5) * dz(); }

    double& at(std::size_t ix, std::size_t iz) { return values[iz * nx + ix]; }
    double at(std::size_t ix, std::size_t iz) const { return values[iz * nx + ix]; }

    double in_range_total() const { return std::accumulate(values.begin(), values.end(), 0.0); }
    double total() const { return in_range_total() + overflow; }

    /// Copy scaled so that the in-range bins sum to one.
    HistogramGrid normalized() const
    {
        HistogramGrid h = *this;
        const double s = in_range_total();
        if (s > 0.0) {
            for (double& v : h.values)
                v /= s;
            h.overflow /= s;
        }
        return h;
    }
};

} // namespace sgsim
