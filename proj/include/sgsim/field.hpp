#pragma once

#include <utility>

#include "sgsim/error.hpp"
#include "sgsim/params.hpp"
#include "sgsim/vec3.hpp"

namespace sgsim {

/// Half-open membership test for the active slab [y_start, y_end).
inline bool in_field_region(double y, const FieldConfig& config)
{
    return y >= config.y_start && y < config.y_end;
}

/// Uniform-plus-quadrupole field: (-x B1, 0, B0 + z B1) inside the slab, zero outside.
inline Vec3 field_at(const Vec3& position, const FieldConfig& config)
{
    if (!in_field_region(position.y, config))
        return {};
    return {-position.x * config.b1, 0.0, config.b0 + position.z * config.b1};
}

/// Central finite-difference divergence and curl of field_at, in T/m.
inline std::pair<double, Vec3> divergence_and_curl_fd(const Vec3& position, const FieldConfig& config, double h)
{
    detail::require(h > 0.0, "divergence_and_curl_fd: h must be > 0");
    detail::require(position.y - h >= config.y_start && position.y + h < config.y_end,
                    "divergence_and_curl_fd: stencil crosses the field region boundary");

    auto d = [&](const Vec3& dir) {
        const Vec3 plus = field_at(position + h * dir, config);
        const Vec3 minus = field_at(position - h * dir, config);
        return (plus - minus) * (0.5 / h);
    };
    const Vec3 dx = d({1, 0, 0});
    const Vec3 dy = d({0, 1, 0});
    const Vec3 dz = d({0, 0, 1});

    const double div = dx.x + dy.y + dz.z;
    const Vec3 curl{dy.z - dz.y, dz.x - dx.z, dx.y - dy.x};
    return {div, curl};
}

/// Gradient of gamma*B.S: gamma*B1*(-S^x, 0, S^z) inside, zero outside.
/// Multiply by hbar/m to obtain an acceleration.
inline Vec3 force_on_moment(const Vec3& spin, const PhysicalParams& params, const FieldConfig& config, bool inside)
{
    if (!inside)
        return {};
    const double g = params.gamma * config.b1;
    return {-g * spin.x, 0.0, g * spin.z};
}

} // namespace sgsim
