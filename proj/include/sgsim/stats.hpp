#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sgsim/error.hpp"

namespace sgsim {

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda)
{
    if (lambda < 0.2)
        return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum))
            break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult
{
    double statistic{0.0}; ///< sup |F_n - F|
    double p_value{1.0};
};

/// One-sample Kolmogorov-Smirnov test against the uniform distribution on [lo, hi].
inline KsResult ks_uniform(std::vector<double> samples, double lo, double hi)
{
    detail::require(!samples.empty(), "ks_uniform: no samples");
    detail::require(lo < hi, "ks_uniform: empty interval");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = std::clamp((samples[i] - lo) / (hi - lo), 0.0, 1.0);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    const double sn = std::sqrt(n);
    return {d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)};
}

/// Number of standard deviations separating an observed binomial fraction from p.
inline double binomial_z(double observed_fraction, double p, double n)
{
    const double sigma = std::sqrt(p * (1.0 - p) / n);
    if (sigma == 0.0)
        return observed_fraction == p ? 0.0 : INFINITY;
    return std::abs(observed_fraction - p) / sigma;
}

} // namespace sgsim
