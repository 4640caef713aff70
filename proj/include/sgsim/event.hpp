#pragma once

#include <cmath>

#include "sgsim/error.hpp"
#include "sgsim/vec3.hpp"

namespace sgsim {

/// Probability (1 + outcome cos xi)/2 of ending up parallel (+1) or antiparallel (-1) to the field.
inline double malus_probability(double xi, int outcome)
{
    detail::require(outcome == 1 || outcome == -1, "malus_probability: outcome must be +1 or -1");
    return 0.5 * (1.0 + outcome * std::cos(xi));
}

/// One-time alignment: +B/(2|B|) if r <= S.B/|B|, otherwise -B/(2|B|). r is uniform in [-1/2, 1/2].
inline Vec3 align_spin_once(const Vec3& spin, const Vec3& b_field, double r)
{
    const double nb = norm(b_field);
    detail::require(nb > 0.0, "align_spin_once: field must be nonzero");
    const double projection = dot(spin, b_field) / nb;
    const double sign = r <= projection ? 0.5 : -0.5;
    return b_field * (sign / nb);
}

} // namespace sgsim
