#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "sgsim/error.hpp"

namespace sgsim {

/// Reduced Planck constant at the precision used throughout (kg m^2 s^-1).
inline constexpr double kHbar = 1.05e-34;

enum class Species
{
    Neutron,
    ImaginarySilver,
};

inline std::string_view to_string(Species s)
{
    return s == Species::Neutron ? "neutron" : "silver";
}

inline std::optional<Species> species_from_string(std::string_view s)
{
    if (s == "neutron")
        return Species::Neutron;
    if (s == "silver" || s == "imaginary_silver")
        return Species::ImaginarySilver;
    return std::nullopt;
}

struct PhysicalParams
{
    double mass{0.0};   ///< kg
    double gamma{0.0};  ///< gyromagnetic ratio, T^-1 s^-1 (signed)
    double hbar{kHbar}; ///< kg m^2 s^-1

    /// hbar/m, the factor converting the spin force of the field model into an acceleration.
    double hbar_over_mass() const { return hbar / mass; }

    void validate() const
    {
        detail::require(mass > 0.0 && std::isfinite(mass), "mass must be > 0");
        detail::require(hbar > 0.0, "hbar must be > 0");
        detail::require(gamma != 0.0 && std::isfinite(gamma), "gamma must be nonzero");
    }
};

/// Uniform field b0 along z plus quadrupole gradient b1, active for y in [y_start, y_end).
struct FieldConfig
{
    double b0{1.0};      ///< T
    double b1{300.0};    ///< T/m
    double y_start{1.0}; ///< m
    double y_end{1.8};   ///< m

    double length() const { return y_end - y_start; }

    void validate() const
    {
        detail::require(b0 >= 0.0 && std::isfinite(b0), "B0 must be >= 0 (sign convention B0,B1 >= 0)");
        detail::require(b1 >= 0.0 && std::isfinite(b1), "B1 must be >= 0 (sign convention B0,B1 >= 0)");
        detail::require(y_start < y_end, "field region requires y_start < y_end");
    }
};

/// Source beam: longitudinal speed and transverse Gaussian spreads.
struct BeamConfig
{
    double v_y{395.6};    ///< m/s
    double sigma_x{0.0};  ///< m, transverse position spread
    double sigma_v{0.0};  ///< m/s, transverse velocity spread

    void validate() const
    {
        detail::require(v_y > 0.0 && std::isfinite(v_y), "v_y must be > 0");
        detail::require(sigma_x >= 0.0, "sigma_x must be >= 0");
        detail::require(sigma_v >= 0.0, "sigma_v must be >= 0");
    }
};

/// Time of flight, characteristic transverse velocity and displacement.
struct Scales
{
    double t_star{0.0}; ///< s
    double v_star{0.0}; ///< m/s
    double z_star{0.0}; ///< m
};

struct DimensionlessCoeffs
{
    double a{0.0};
    double b{0.0};
    double c{0.0};
};

struct Preset
{
    PhysicalParams params;
    BeamConfig beam;
};

// The gyromagnetic ratios carry the digits the published dimensionless
// coefficients were computed with; both round to the printed -1.83e8 and
// -1.09e7.
inline Preset preset(Species species)
{
    switch (species) {
    case Species::Neutron:
        return {PhysicalParams{1.67e-27, -1.8330e8, kHbar}, BeamConfig{395.6, 0.0, 0.0}};
    case Species::ImaginarySilver:
        return {PhysicalParams{1.79e-25, -1.08718e7, kHbar}, BeamConfig{540.0, 0.0, 0.0}};
    }
    throw RangeError("unknown species");
}

/// Signed transverse acceleration hbar gamma B1 / 2m of a spin aligned with +z.
inline double spin_half_acceleration(const PhysicalParams& params, const FieldConfig& field)
{
    return params.hbar * params.gamma * field.b1 / (2.0 * params.mass);
}

inline Scales derive_scales(const PhysicalParams& params, const FieldConfig& field, const BeamConfig& beam)
{
    detail::require(beam.v_y > 0.0, "derive_scales: v_y must be > 0");
    Scales s;
    s.t_star = field.length() / beam.v_y;
    s.v_star = std::abs(spin_half_acceleration(params, field)) * s.t_star;
    s.z_star = s.v_star * s.t_star / 2.0;
    return s;
}

/// Coefficients of the dimensionless momentum-space Pauli Hamiltonian for time scale t0 and velocity scale v0.
inline DimensionlessCoeffs dimensionless_coeffs(const PhysicalParams& params, const FieldConfig& field, double t0,
                                                double v0)
{
    detail::require(t0 > 0.0 && std::isfinite(t0), "dimensionless_coeffs: t0 must be > 0");
    detail::require(v0 > 0.0 && std::isfinite(v0), "dimensionless_coeffs: v0 must be > 0");
    const double m = params.mass;
    const double hb = params.hbar;
    // b is formed as (g t0)/v0 so that v0 = |g| t0 gives exactly +-1
    return {m * t0 * v0 * v0 / (2.0 * hb), spin_half_acceleration(params, field) * t0 / v0,
            params.gamma * field.b0 * t0 / 2.0};
}

/// Transverse displacement accumulated over a field-free flight of the given longitudinal distance.
inline double free_flight_displacement(double v_transverse, double distance, double v_y)
{
    detail::require(v_y > 0.0, "free_flight_displacement: v_y must be > 0");
    return v_transverse * distance / v_y;
}

} // namespace sgsim
