#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "sgsim/error.hpp"

namespace sgsim {

/// J_0(x) ... J_{n_max}(x) for x >= 0 by Miller's backward recurrence,
/// normalized with J_0 + 2 sum J_2k = 1.
inline std::vector<double> bessel_j_sequence(double x, std::size_t n_max)
{
    detail::require(x >= 0.0 && std::isfinite(x), "bessel_j_sequence: x must be finite and >= 0");
    std::vector<double> j(n_max + 1, 0.0);
    if (x == 0.0) {
        j[0] = 1.0;
        return j;
    }

    // Start well beyond the turning point at k = x, where J_k decays faster than exponentially.
    const auto start = static_cast<std::size_t>(x + 30.0 * std::cbrt(x) + 60.0);
    const std::size_t top = std::max(start, n_max + 20);
    double above = 0.0;
    double here = 1e-300;
    double norm = 0.0;
    for (std::size_t k = top; k-- > 0;) {
        // here = J_{k+1}, above = J_{k+2} (unnormalized) -> J_k
        const double next = 2.0 * static_cast<double>(k + 1) / x * here - above;
        above = here;
        here = next;
        if (k <= n_max)
            j[k] = here;
        if (k % 2 == 0)
            norm += k == 0 ? here : 2.0 * here;
        if (std::abs(here) > 1e250) {
            for (std::size_t i = k; i <= n_max && i < j.size(); ++i)
                j[i] *= 1e-250;
            above *= 1e-250;
            here *= 1e-250;
            norm *= 1e-250;
        }
    }
    for (double& v : j)
        v /= norm;
    return j;
}

} // namespace sgsim
