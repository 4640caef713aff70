#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgsim/error.hpp"
#include "sgsim/histogram.hpp"
#include "sgsim/newton.hpp"

namespace sgsim {

enum class Axis
{
    Vx,
    Vz,
};

inline std::string to_string(Axis a)
{
    return a == Axis::Vx ? "vx" : "vz";
}

namespace detail {
/// Bin index of v on [lo, hi) with n bins, or nullopt when out of range.
inline std::optional<std::size_t> bin_index(double v, double lo, double hi, std::size_t n)
{
    if (!(v >= lo && v < hi))
        return std::nullopt;
    const auto i = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(n));
    return std::min(i, n - 1);
}
} // namespace detail

/// Counts over [-range, range]^2 of (vx, vz) / v_unit. Out-of-range records go to the overflow tally.
inline HistogramGrid histogram2d(std::span<const ExitRecord> records, std::size_t bins, double range, double v_unit,
                                 const std::string& unit = "v_star")
{
    detail::require(v_unit > 0.0, "histogram2d: velocity unit must be > 0");
    HistogramGrid h = HistogramGrid::symmetric(bins, range, unit);
    for (const ExitRecord& r : records) {
        const auto ix = detail::bin_index(r.vx / v_unit, h.x_lo, h.x_hi, h.nx);
        const auto iz = detail::bin_index(r.vz / v_unit, h.z_lo, h.z_hi, h.nz);
        if (ix && iz)
            h.at(*ix, *iz) += 1.0;
        else
            h.overflow += 1.0;
    }
    return h;
}

/// Mass-conserving transfer onto a symmetric grid: each source bin is split by its area overlap with the target bins.
inline HistogramGrid rebin(const HistogramGrid& src, std::size_t bins, double range)
{
    HistogramGrid dst = HistogramGrid::symmetric(bins, range, src.unit);
    dst.overflow = src.overflow;
    auto weights = [&](double lo, double width, std::size_t n) {
        // per source bin: list of (target index, fraction)
        std::vector<std::vector<std::pair<std::size_t, double>>> w(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = lo + static_cast<double>(i) * width;
            const double b = a + width;
            const double ta = std::max(a, -range);
            const double tb = std::min(b, range);
            if (tb <= ta)
                continue;
            const auto first = static_cast<std::size_t>(std::floor((ta + range) / dst.dx()));
            for (std::size_t j = std::min(first, bins - 1); j < bins; ++j) {
                const double ja = -range + static_cast<double>(j) * dst.dx();
                const double ov = std::min(tb, ja + dst.dx()) - std::max(ta, ja);
                if (ja >= tb)
                    break;
                if (ov > 0.0)
                    w[i].emplace_back(j, ov / width);
            }
        }
        return w;
    };
    const auto wx = weights(src.x_lo, src.dx(), src.nx);
    const auto wz = weights(src.z_lo, src.dz(), src.nz);
    for (std::size_t iz = 0; iz < src.nz; ++iz)
        for (std::size_t ix = 0; ix < src.nx; ++ix) {
            const double v = src.at(ix, iz);
            if (v == 0.0)
                continue;
            double placed = 0.0;
            for (const auto& [jz, fz] : wz[iz])
                for (const auto& [jx, fx] : wx[ix]) {
                    dst.at(jx, jz) += v * fz * fx;
                    placed += v * fz * fx;
                }
            dst.overflow += v - placed;
        }
    return dst;
}

struct WindowProjection
{
    Axis axis{Axis::Vx};       ///< projected axis
    double window_half_width{0.01};
    double lo{0.0};
    double hi{0.0};
    std::vector<double> counts;
    double overflow{0.0}; ///< windowed records outside [lo, hi)

    std::size_t bins() const { return counts.size(); }
    double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * (hi - lo) / bins(); }
};

namespace detail {
inline double along(const ExitRecord& r, Axis a)
{
    return a == Axis::Vx ? r.vx : r.vz;
}
inline double across(const ExitRecord& r, Axis a)
{
    return a == Axis::Vx ? r.vz : r.vx;
}
} // namespace detail

/// 1D histogram along `axis` of the records whose other velocity component lies within +-window_half_width.
inline WindowProjection window_projection(std::span<const ExitRecord> records, Axis axis, double window_half_width,
                                          std::size_t bins, double range, double v_unit)
{
    detail::require(window_half_width > 0.0, "window_projection: window half-width must be > 0");
    detail::require(bins >= 2 && range > 0.0 && v_unit > 0.0, "window_projection: invalid binning");
    WindowProjection p;
    p.axis = axis;
    p.window_half_width = window_half_width;
    p.lo = -range;
    p.hi = range;
    p.counts.assign(bins, 0.0);
    for (const ExitRecord& r : records) {
        if (std::abs(detail::across(r, axis) / v_unit) > window_half_width)
            continue;
        if (const auto i = detail::bin_index(detail::along(r, axis) / v_unit, p.lo, p.hi, bins))
            p.counts[*i] += 1.0;
        else
            p.overflow += 1.0;
    }
    return p;
}

struct SpinProfile
{
    WindowProjection projection;
    std::vector<std::optional<Vec3>> mean_spin; ///< absent where the bin holds no records
};

/// Per-bin mean exit spin of the windowed records.
inline SpinProfile conditional_spin_average(std::span<const ExitRecord> records, Axis axis, double window_half_width,
                                            std::size_t bins, double range, double v_unit)
{
    SpinProfile s;
    s.projection = window_projection(records, axis, window_half_width, bins, range, v_unit);
    std::vector<Vec3> sum(bins);
    for (const ExitRecord& r : records) {
        if (std::abs(detail::across(r, axis) / v_unit) > window_half_width)
            continue;
        if (const auto i = detail::bin_index(detail::along(r, axis) / v_unit, -range, range, bins))
            sum[*i] = sum[*i] + r.spin;
    }
    s.mean_spin.resize(bins);
    for (std::size_t i = 0; i < bins; ++i)
        if (s.projection.counts[i] > 0.0)
            s.mean_spin[i] = sum[i] * (1.0 / s.projection.counts[i]);
    return s;
}

namespace detail {
/// Part of row iz lying below vz = 0.
inline double negative_share(const HistogramGrid& h, std::size_t iz)
{
    return std::clamp(0.5 - h.z_center(iz) / h.dz(), 0.0, 1.0);
}
} // namespace detail

struct SideWeights
{
    double negative{0.0}; ///< P(vz < 0)
    double positive{0.0}; ///< P(vz > 0)
};

/// Mass on each side of vz = 0 over the in-range bins; a bin straddling 0 is split by its overlap.
inline SideWeights side_weights(const HistogramGrid& h)
{
    SideWeights w;
    double total = 0.0;
    for (std::size_t iz = 0; iz < h.nz; ++iz) {
        double row = 0.0;
        for (std::size_t ix = 0; ix < h.nx; ++ix)
            row += h.at(ix, iz);
        const double neg_share = detail::negative_share(h, iz);
        w.negative += row * neg_share;
        w.positive += row * (1.0 - neg_share);
        total += row;
    }
    if (total > 0.0) {
        w.negative /= total;
        w.positive /= total;
    }
    return w;
}

/// Fraction of records with vz < 0 and vz > 0; records exactly at 0 count half to each side.
inline SideWeights side_weights(std::span<const ExitRecord> records)
{
    SideWeights w;
    if (records.empty())
        return w;
    for (const ExitRecord& r : records) {
        if (r.vz < 0.0)
            w.negative += 1.0;
        else if (r.vz > 0.0)
            w.positive += 1.0;
        else {
            w.negative += 0.5;
            w.positive += 0.5;
        }
    }
    const auto n = static_cast<double>(records.size());
    w.negative /= n;
    w.positive /= n;
    return w;
}

enum class Shape
{
    TwoSpots,
    Stripe,
    Ring,
    Other,
};

inline std::string to_string(Shape s)
{
    switch (s) {
    case Shape::TwoSpots:
        return "two_spots";
    case Shape::Stripe:
        return "stripe";
    case Shape::Ring:
        return "ring";
    default:
        return "other";
    }
}

struct ShapeMetrics
{
    double radial_peak{0.0};       ///< centre of the annulus holding the most mass
    double radial_peak_width{0.0}; ///< full width at half maximum of the radial mass profile
    double pole_fraction{0.0};     ///< mass within 15 degrees of the +-vz directions, |v| >= 0.25
    double angular_spread_deg{0.0}; ///< occupied 5-degree sectors, |v| >= 0.25
    double vz_bimodality{0.0};     ///< separation of the vz < 0 and vz > 0 means over the larger side std
    double vx_width{0.0};          ///< standard deviation of the vx marginal
    double vz_spread{0.0};         ///< 1% to 99% quantile range of the vz marginal
};

struct ShapeResult
{
    Shape shape{Shape::Other};
    ShapeMetrics metrics;
};

namespace shape {
inline constexpr double kInnerRadius = 0.25;
inline constexpr double kPoleHalfAngleDeg = 15.0;
inline constexpr std::size_t kSectors = 72;
inline constexpr double kSectorOccupancy = 0.1;
inline constexpr double kRadialBin = 0.05;

inline constexpr double kTwoSpotsPoleFraction = 0.6;
inline constexpr double kTwoSpotsBimodality = 4.0;
inline constexpr double kRingPeakLo = 0.8;
inline constexpr double kRingPeakHi = 1.1;
inline constexpr double kRingSpreadDeg = 270.0;
inline constexpr double kStripeVxWidth = 0.05;
inline constexpr double kStripeVzSpread = 1.5;
} // namespace shape

namespace detail {
inline double quantile(const std::vector<double>& mass, double lo, double width, double q)
{
    double total = 0.0;
    for (double m : mass)
        total += m;
    const double target = q * total;
    double cum = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        if (mass[i] > 0.0 && cum + mass[i] >= target)
            return lo + (static_cast<double>(i) + (target - cum) / mass[i]) * width;
        cum += mass[i];
    }
    return lo + static_cast<double>(mass.size()) * width;
}
} // namespace detail

inline ShapeMetrics shape_metrics(const HistogramGrid& hist)
{
    using namespace shape;
    const HistogramGrid h = hist.normalized();
    ShapeMetrics m;
    if (h.in_range_total() <= 0.0)
        return m;

    const double r_max = std::hypot(std::max(std::abs(h.x_lo), std::abs(h.x_hi)),
                                    std::max(std::abs(h.z_lo), std::abs(h.z_hi)));
    std::vector<double> radial(static_cast<std::size_t>(r_max / kRadialBin) + 1, 0.0);
    std::vector<double> sectors(kSectors, 0.0);
    std::vector<double> mx(h.nx, 0.0);
    std::vector<double> mz(h.nz, 0.0);
    double outer = 0.0;
    double pole = 0.0;
    const double pole_cos = std::cos(kPoleHalfAngleDeg * std::numbers::pi / 180.0);

    for (std::size_t iz = 0; iz < h.nz; ++iz) {
        const double z = h.z_center(iz);
        for (std::size_t ix = 0; ix < h.nx; ++ix) {
            const double w = h.at(ix, iz);
            if (w == 0.0)
                continue;
            const double x = h.x_center(ix);
            const double r = std::hypot(x, z);
            mx[ix] += w;
            mz[iz] += w;
            radial[std::min(radial.size() - 1, static_cast<std::size_t>(r / kRadialBin))] += w;
            if (r < kInnerRadius)
                continue;
            outer += w;
            if (std::abs(z) / r >= pole_cos)
                pole += w;
            double phi = std::atan2(z, x);
            if (phi < 0.0)
                phi += 2.0 * std::numbers::pi;
            const auto s = static_cast<std::size_t>(phi / (2.0 * std::numbers::pi) * kSectors);
            sectors[std::min(s, kSectors - 1)] += w;
        }
    }

    const auto peak = std::max_element(radial.begin(), radial.end());
    m.radial_peak = (static_cast<double>(peak - radial.begin()) + 0.5) * kRadialBin;
    {
        const double half = 0.5 * *peak;
        auto lo = peak;
        while (lo != radial.begin() && *(lo - 1) >= half)
            --lo;
        auto hi = peak;
        while (hi + 1 != radial.end() && *(hi + 1) >= half)
            ++hi;
        m.radial_peak_width = static_cast<double>(hi - lo + 1) * kRadialBin;
    }

    if (outer > 0.0) {
        m.pole_fraction = pole / outer;
        const double share = outer / kSectors;
        std::size_t occupied = 0;
        for (double s : sectors)
            if (s >= kSectorOccupancy * share)
                ++occupied;
        m.angular_spread_deg = static_cast<double>(occupied) * 360.0 / kSectors;
    }

    // vx marginal width
    {
        double mean = 0.0;
        for (std::size_t ix = 0; ix < h.nx; ++ix)
            mean += mx[ix] * h.x_center(ix);
        double var = 0.0;
        for (std::size_t ix = 0; ix < h.nx; ++ix)
            var += mx[ix] * std::pow(h.x_center(ix) - mean, 2);
        m.vx_width = std::sqrt(var);
    }

    // vz marginal: spread and two-sided bimodality
    m.vz_spread = detail::quantile(mz, h.z_lo, h.dz(), 0.99) - detail::quantile(mz, h.z_lo, h.dz(), 0.01);
    {
        std::array<double, 2> w{}, s1{}, s2{};
        for (std::size_t iz = 0; iz < h.nz; ++iz) {
            const double neg = detail::negative_share(h, iz);
            const double z = h.z_center(iz);
            const double part[2] = {mz[iz] * neg, mz[iz] * (1.0 - neg)};
            for (int k = 0; k < 2; ++k) {
                w[k] += part[k];
                s1[k] += part[k] * z;
                s2[k] += part[k] * z * z;
            }
        }
        if (w[0] > 0.0 && w[1] > 0.0) {
            const double m0 = s1[0] / w[0];
            const double m1 = s1[1] / w[1];
            const double sd0 = std::sqrt(std::max(0.0, s2[0] / w[0] - m0 * m0));
            const double sd1 = std::sqrt(std::max(0.0, s2[1] / w[1] - m1 * m1));
            const double sd = std::max({sd0, sd1, 0.5 * h.dz()});
            m.vz_bimodality = (m1 - m0) / sd;
        }
    }
    return m;
}

/// Labels a transverse-velocity histogram whose axes are in units of the characteristic velocity.
inline ShapeResult classify_shape(const HistogramGrid& hist)
{
    using namespace shape;
    ShapeResult r;
    r.metrics = shape_metrics(hist);
    const ShapeMetrics& m = r.metrics;
    if (m.pole_fraction > kTwoSpotsPoleFraction && m.vz_bimodality > kTwoSpotsBimodality)
        r.shape = Shape::TwoSpots;
    else if (m.vx_width < kStripeVxWidth && m.vz_spread > kStripeVzSpread)
        r.shape = Shape::Stripe;
    else if (m.radial_peak >= kRingPeakLo && m.radial_peak <= kRingPeakHi && m.angular_spread_deg > kRingSpreadDeg)
        r.shape = Shape::Ring;
    return r;
}

} // namespace sgsim
