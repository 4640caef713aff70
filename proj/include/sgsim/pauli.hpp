#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sgsim/bessel.hpp"
#include "sgsim/error.hpp"
#include "sgsim/fft.hpp"
#include "sgsim/histogram.hpp"
#include "sgsim/params.hpp"

namespace sgsim {

/// Square grid of dimensionless transverse velocities, points at -half_width + j*delta.
struct GridSpec
{
    std::size_t points{512};
    double half_width{4.0};

    double delta() const { return 2.0 * half_width / static_cast<double>(points); }
    double coord(std::size_t j) const { return -half_width + static_cast<double>(j) * delta(); }
    std::size_t cells() const { return points * points; }

    void validate() const
    {
        detail::require(points >= 64 && (points & (points - 1)) == 0,
                        "grid: points per axis must be a power of two >= 64");
        detail::require(half_width > 0.0 && std::isfinite(half_width), "grid: half_width must be > 0");
    }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct SpinState
{
    double theta{0.0};
    double alpha{0.0};

    cplx up() const { return std::cos(0.5 * theta) * std::polar(1.0, -0.5 * alpha); }
    cplx down() const { return std::sin(0.5 * theta) * std::polar(1.0, 0.5 * alpha); }
};

/// Two-component spinor on the grid. Storage is the up component followed by the down component.
struct SpinorGrid
{
    GridSpec spec;
    CVector data;

    explicit SpinorGrid(const GridSpec& s = {}) : spec(s), data(2 * s.cells(), cplx{}) {}

    std::span<cplx> up() { return {data.data(), spec.cells()}; }
    std::span<cplx> down() { return {data.data() + spec.cells(), spec.cells()}; }
    std::span<const cplx> up() const { return {data.data(), spec.cells()}; }
    std::span<const cplx> down() const { return {data.data() + spec.cells(), spec.cells()}; }
};

struct HamiltonianOptions
{
    bool sigma_x{true}; ///< keep the b sigma^x p_x coupling
};

/// Centered Gaussian amplitude exp(-r^2/2 sigma^2) times the spinor weights, normalized on the grid.
inline SpinorGrid init_state(const SpinState& spin, double sigma, const GridSpec& spec)
{
    spec.validate();
    detail::require(sigma > 0.0, "init_state: sigma must be > 0");
    detail::require(sigma >= 3.0 * spec.delta(), "init_state: sigma must be at least 3 grid spacings");
    SpinorGrid psi(spec);
    const std::size_t n = spec.points;
    std::vector<double> g(n);
    for (std::size_t j = 0; j < n; ++j)
        g[j] = std::exp(-spec.coord(j) * spec.coord(j) / (2.0 * sigma * sigma));
    double sum = 0.0;
    for (std::size_t iz = 0; iz < n; ++iz)
        for (std::size_t ix = 0; ix < n; ++ix)
            sum += g[iz] * g[iz] * g[ix] * g[ix];
    const double scale = 1.0 / std::sqrt(sum * spec.delta() * spec.delta());
    const cplx cu = spin.up() * scale;
    const cplx cd = spin.down() * scale;
    auto up = psi.up();
    auto down = psi.down();
    for (std::size_t iz = 0; iz < n; ++iz)
        for (std::size_t ix = 0; ix < n; ++ix) {
            const double a = g[iz] * g[ix];
            up[iz * n + ix] = cu * a;
            down[iz * n + ix] = cd * a;
        }
    return psi;
}

struct Observables
{
    double norm{0.0};
    double weight_up{0.0};
    double weight_down{0.0};
    double mean_x_up{0.0};
    double mean_z_up{0.0};
    double mean_x_down{0.0};
    double mean_z_down{0.0};
};

inline Observables observables(const SpinorGrid& psi)
{
    const GridSpec& s = psi.spec;
    const std::size_t n = s.points;
    const double cell = s.delta() * s.delta();
    Observables o;
    double xu = 0, zu = 0, xd = 0, zd = 0;
    auto up = psi.up();
    auto down = psi.down();
    for (std::size_t iz = 0; iz < n; ++iz) {
        const double z = s.coord(iz);
        for (std::size_t ix = 0; ix < n; ++ix) {
            const double x = s.coord(ix);
            const double pu = std::norm(up[iz * n + ix]);
            const double pd = std::norm(down[iz * n + ix]);
            o.weight_up += pu;
            o.weight_down += pd;
            xu += x * pu;
            zu += z * pu;
            xd += x * pd;
            zd += z * pd;
        }
    }
    o.weight_up *= cell;
    o.weight_down *= cell;
    o.norm = o.weight_up + o.weight_down;
    if (o.weight_up > 0.0) {
        o.mean_x_up = xu * cell / o.weight_up;
        o.mean_z_up = zu * cell / o.weight_up;
    }
    if (o.weight_down > 0.0) {
        o.mean_x_down = xd * cell / o.weight_down;
        o.mean_z_down = zd * cell / o.weight_down;
    }
    return o;
}

enum class ProbabilityComponent
{
    Total,
    Up,
    Down,
};

/// Cell probabilities delta^2 |psi|^2 as a histogram whose bins are centered on the grid points.
inline HistogramGrid probability_map(const SpinorGrid& psi, ProbabilityComponent which = ProbabilityComponent::Total,
                                     const std::string& unit = "v_star")
{
    const GridSpec& s = psi.spec;
    HistogramGrid h;
    h.nx = h.nz = s.points;
    h.x_lo = h.z_lo = -s.half_width - 0.5 * s.delta();
    h.x_hi = h.z_hi = s.half_width - 0.5 * s.delta();
    h.unit = unit;
    h.values.resize(s.cells());
    const double cell = s.delta() * s.delta();
    auto up = psi.up();
    auto down = psi.down();
    for (std::size_t i = 0; i < s.cells(); ++i) {
        const double pu = which == ProbabilityComponent::Down ? 0.0 : std::norm(up[i]);
        const double pd = which == ProbabilityComponent::Up ? 0.0 : std::norm(down[i]);
        h.values[i] = cell * (pu + pd);
    }
    return h;
}

/// Fraction of the norm within `margin_points` grid points of any edge.
inline double edge_fraction(const SpinorGrid& psi, std::size_t margin_points = 10)
{
    const std::size_t n = psi.spec.points;
    double edge = 0.0;
    double total = 0.0;
    auto up = psi.up();
    auto down = psi.down();
    for (std::size_t iz = 0; iz < n; ++iz)
        for (std::size_t ix = 0; ix < n; ++ix) {
            const double p = std::norm(up[iz * n + ix]) + std::norm(down[iz * n + ix]);
            total += p;
            if (ix < margin_points || iz < margin_points || ix + margin_points >= n || iz + margin_points >= n)
                edge += p;
        }
    return total > 0.0 ? edge / total : 0.0;
}

enum class GridVerdict
{
    Ok,
    Warn,
    Reject,
};

struct GridCheck
{
    double two_a_delta{0.0};
    GridVerdict verdict{GridVerdict::Ok};
};

/// Resolution of the a(x^2 + z^2) term: 2 a delta is the potential step between neighbours at |x| = 1.
inline GridCheck check_grid(const GridSpec& spec, const DimensionlessCoeffs& coeffs)
{
    GridCheck g;
    g.two_a_delta = 2.0 * std::abs(coeffs.a) * spec.delta();
    if (g.two_a_delta >= 2.0)
        g.verdict = GridVerdict::Reject;
    else if (g.two_a_delta >= 0.01)
        g.verdict = GridVerdict::Warn;
    return g;
}

struct SpectralBounds
{
    double e_min{0.0};
    double e_max{0.0};
    double centre() const { return 0.5 * (e_max + e_min); }
    double half_range() const { return 0.5 * (e_max - e_min); }
};

/// The dimensionless Hamiltonian a(x^2+z^2) - c sigma^z - b sigma^z p_z + b sigma^x p_x, p = i d/d(axis),
/// with spectral derivatives on the periodic grid.
class PauliOperator
{
  public:
    PauliOperator(const GridSpec& spec, const DimensionlessCoeffs& coeffs, HamiltonianOptions options = {})
        : spec_(spec), coeffs_(coeffs), options_(options), plan_(spec.points, 2), work_(2 * spec.cells())
    {
        spec.validate();
        detail::require(std::isfinite(coeffs.a) && std::isfinite(coeffs.b) && std::isfinite(coeffs.c),
                        "PauliOperator: coefficients must be finite");
        const std::size_t n = spec.points;
        r2_.resize(spec.cells());
        k_.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            k_[j] = fft_wavenumber(j, n, spec.delta());
        for (std::size_t iz = 0; iz < n; ++iz)
            for (std::size_t ix = 0; ix < n; ++ix)
                r2_[iz * n + ix] = spec.coord(ix) * spec.coord(ix) + spec.coord(iz) * spec.coord(iz);
    }

    const GridSpec& spec() const { return spec_; }
    const DimensionlessCoeffs& coeffs() const { return coeffs_; }

    /// Rigorous bounds: exact extremes of the diagonal part plus the norm of the derivative part.
    SpectralBounds bounds() const
    {
        const double a = coeffs_.a;
        const double r2_max = 2.0 * spec_.half_width * spec_.half_width;
        const double d_lo = std::min(0.0, a * r2_max) - std::abs(coeffs_.c);
        const double d_hi = std::max(0.0, a * r2_max) + std::abs(coeffs_.c);
        const double k_max = std::numbers::pi / spec_.delta();
        const double k_norm = std::abs(coeffs_.b) * k_max * (options_.sigma_x ? std::sqrt(2.0) : 1.0);
        return {d_lo - k_norm, d_hi + k_norm};
    }

    /// out = H in.
    void apply(const CVector& in, CVector& out)
    {
        out.resize(in.size());
        affine(in, out, 1.0, 0.0, 0.0, nullptr, cplx{});
    }

    /// out = alpha (H - shift) in + beta out, and acc += coef out when acc is given.
    /// Returns the squared 2-norm of the new out (grid sum, no cell factor).
    double affine(const CVector& in, CVector& out, double alpha, double shift, double beta, CVector* acc, cplx coef)
    {
        const std::size_t cells = spec_.cells();
        const std::size_t n = spec_.points;
        detail::require(in.size() == 2 * cells && out.size() == 2 * cells, "PauliOperator: buffer size mismatch");

        std::copy(in.begin(), in.end(), work_.begin());
        plan_.forward(work_);
        const double scale = coeffs_.b / static_cast<double>(cells);
        const bool sx = options_.sigma_x;
        cplx* w = work_.data();
        for (std::size_t iz = 0; iz < n; ++iz) {
            const double kz = k_[iz];
            for (std::size_t ix = 0; ix < n; ++ix) {
                const double kx = sx ? k_[ix] : 0.0;
                const std::size_t i = iz * n + ix;
                const cplx u = w[i];
                const cplx d = w[cells + i];
                w[i] = scale * (kz * u - kx * d);
                w[cells + i] = scale * (-kz * d - kx * u);
            }
        }
        plan_.backward(work_);

        const double a = coeffs_.a;
        const double c = coeffs_.c;
        const cplx* src = in.data();
        cplx* dst = out.data();
        cplx* ac = acc ? acc->data() : nullptr;
        double norm2 = 0.0;
        for (std::size_t i = 0; i < cells; ++i) {
            const double pot = a * r2_[i];
            const cplx hu = (pot - c - shift) * src[i] + w[i];
            const cplx hd = (pot + c - shift) * src[cells + i] + w[cells + i];
            const cplx nu = beta == 0.0 ? alpha * hu : alpha * hu + beta * dst[i];
            const cplx nd = beta == 0.0 ? alpha * hd : alpha * hd + beta * dst[cells + i];
            dst[i] = nu;
            dst[cells + i] = nd;
            norm2 += std::norm(nu) + std::norm(nd);
            if (ac) {
                ac[i] += coef * nu;
                ac[cells + i] += coef * nd;
            }
        }
        return norm2;
    }

  private:
    GridSpec spec_;
    DimensionlessCoeffs coeffs_;
    HamiltonianOptions options_;
    FftPlan2D plan_;
    CVector work_;
    std::vector<double> r2_;
    std::vector<double> k_;
};

inline SpinorGrid apply_hamiltonian(const SpinorGrid& psi, const DimensionlessCoeffs& coeffs,
                                    HamiltonianOptions options = {})
{
    PauliOperator h(psi.spec, coeffs, options);
    SpinorGrid out(psi.spec);
    h.apply(psi.data, out.data);
    return out;
}

struct PropagateOptions
{
    HamiltonianOptions hamiltonian;
    double margin{0.02};          ///< relative widening of the spectral half-range
    double tolerance{1e-14};      ///< Bessel coefficient cutoff
    std::size_t max_terms{2000000};
};

struct PropagationReport
{
    std::size_t terms{0};
    double centre{0.0};
    double half_range{0.0};
    double two_a_delta{0.0};
    double edge_fraction{0.0};
    std::vector<std::string> warnings;
};

namespace detail {
inline void check_grid_or_throw(const GridSpec& spec, const DimensionlessCoeffs& coeffs, PropagationReport* report)
{
    const GridCheck g = check_grid(spec, coeffs);
    if (g.verdict == GridVerdict::Reject)
        throw RangeError("grid too coarse for a = " + std::to_string(coeffs.a) + ": 2 a delta = " +
                         std::to_string(g.two_a_delta) + " (must be < 2; reduce t0/v0 or refine the grid)");
    if (report) {
        report->two_a_delta = g.two_a_delta;
        if (g.verdict == GridVerdict::Warn)
            report->warnings.push_back("2 a delta = " + std::to_string(g.two_a_delta) +
                                       " is not small compared to 1; the a(x^2+z^2) term is coarsely resolved");
    }
}

inline void check_edges(const SpinorGrid& psi, PropagationReport* report)
{
    if (!report)
        return;
    report->edge_fraction = edge_fraction(psi, 10);
    if (report->edge_fraction > 1e-6)
        report->warnings.push_back("fraction " + std::to_string(report->edge_fraction) +
                                   " of the norm lies within 10 grid points of the boundary");
}
} // namespace detail

/// psi(t) = exp(-i H t) psi(0) by Chebyshev expansion with Bessel coefficients.
inline SpinorGrid chebyshev_propagate(const SpinorGrid& psi, const DimensionlessCoeffs& coeffs, double t,
                                      const PropagateOptions& options = {}, PropagationReport* report = nullptr)
{
    detail::require(t >= 0.0 && std::isfinite(t), "chebyshev_propagate: t must be >= 0");
    if (t == 0.0)
        return psi;
    detail::check_grid_or_throw(psi.spec, coeffs, report);

    PauliOperator h(psi.spec, coeffs, options.hamiltonian);
    const SpectralBounds sb = h.bounds();
    const double centre = sb.centre();
    const double radius = sb.half_range() * (1.0 + options.margin);
    const double x = radius * t;

    const auto j_max = static_cast<std::size_t>(x + 30.0 * std::cbrt(x) + 60.0);
    const std::vector<double> j = bessel_j_sequence(x, j_max);
    std::size_t terms = j.size();
    for (std::size_t k = static_cast<std::size_t>(x); k + 2 < j.size(); ++k)
        if (std::abs(j[k]) < options.tolerance && std::abs(j[k + 1]) < options.tolerance &&
            std::abs(j[k + 2]) < options.tolerance) {
            terms = k;
            break;
        }
    if (terms > options.max_terms)
        throw EngineError("chebyshev_propagate: " + std::to_string(terms) + " terms exceed the budget of " +
                          std::to_string(options.max_terms));

    // coefficient of T_k: (2 - delta_k0) (-i)^k J_k(R t), times the global phase exp(-i E_c t)
    const cplx phase = std::polar(1.0, -centre * t);
    auto coef = [&](std::size_t k) {
        static constexpr cplx kMinusI[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
        return phase * kMinusI[k % 4] * (k == 0 ? 1.0 : 2.0) * j[k];
    };

    const std::size_t size = psi.data.size();
    double norm0 = 0.0;
    for (const cplx& v : psi.data)
        norm0 += std::norm(v);
    const double limit = 2.25 * norm0; // |phi_k| <= 1.5 |psi|

    SpinorGrid out(psi.spec);
    CVector& acc = out.data;
    for (std::size_t i = 0; i < size; ++i)
        acc[i] = coef(0) * psi.data[i];

    CVector prev = psi.data;
    CVector cur(size);
    if (terms > 1) {
        const double n1 = h.affine(prev, cur, 1.0 / radius, centre, 0.0, &acc, coef(1));
        if (!(n1 <= limit))
            throw EngineError("chebyshev_propagate: expansion diverged (spectral bound too small)");
    }
    for (std::size_t k = 2; k < terms; ++k) {
        // prev <- 2 (H - E_c)/R cur - prev
        const double nk = h.affine(cur, prev, 2.0 / radius, centre, -1.0, &acc, coef(k));
        if (!(nk <= limit))
            throw EngineError("chebyshev_propagate: expansion diverged at term " + std::to_string(k) +
                              " (spectral bound too small)");
        std::swap(prev, cur);
    }

    if (report) {
        report->terms = terms;
        report->centre = centre;
        report->half_range = radius;
    }
    detail::check_edges(out, report);
    return out;
}

/// Closed form with the sigma^x term dropped: each component is translated along z by g t, g = s b,
/// and picks up the phase exp(i c s t - i a x^2 t - i a (z^2 t - g z t^2 + g^2 t^3 / 3)).
/// `initial(x, z)` returns the (up, down) amplitudes at t = 0.
template <class Initial>
SpinorGrid textbook_closed_form(const GridSpec& spec, const DimensionlessCoeffs& coeffs, double t, Initial&& initial)
{
    SpinorGrid out(spec);
    const std::size_t n = spec.points;
    auto up = out.up();
    auto down = out.down();
    const double a = coeffs.a;
    for (int si = 0; si < 2; ++si) {
        const double s = si == 0 ? 1.0 : -1.0;
        const double g = s * coeffs.b;
        for (std::size_t iz = 0; iz < n; ++iz) {
            const double z = spec.coord(iz);
            for (std::size_t ix = 0; ix < n; ++ix) {
                const double x = spec.coord(ix);
                const double ph = coeffs.c * s * t - a * x * x * t - a * (z * z * t - g * z * t * t + g * g * t * t * t / 3.0);
                const auto amp = initial(x, z - g * t);
                const cplx v = std::polar(1.0, ph) * (si == 0 ? amp.first : amp.second);
                (si == 0 ? up : down)[iz * n + ix] = v;
            }
        }
    }
    return out;
}

/// Repeated exact factored propagator of the sigma^x-free Hamiltonian: spectral shift by g dt,
/// then the diagonal phases of one step.
inline SpinorGrid product_formula_propagate(const SpinorGrid& psi, const DimensionlessCoeffs& coeffs, double t,
                                            std::size_t n_steps)
{
    detail::require(t >= 0.0, "product_formula_propagate: t must be >= 0");
    detail::require(n_steps >= 1, "product_formula_propagate: n_steps must be >= 1");
    if (t == 0.0)
        return psi;
    const GridSpec& spec = psi.spec;
    const std::size_t n = spec.points;
    const std::size_t cells = spec.cells();
    const double dt = t / static_cast<double>(n_steps);
    const double a = coeffs.a;

    FftPlan2D plan(n, 2);
    std::vector<double> k(n);
    for (std::size_t j = 0; j < n; ++j)
        k[j] = fft_wavenumber(j, n, spec.delta());

    // per-step multipliers: shift in k-space, phase in grid space, for s = +1 and s = -1
    CVector shift(2 * n);
    CVector phase(2 * cells);
    for (int si = 0; si < 2; ++si) {
        const double s = si == 0 ? 1.0 : -1.0;
        const double g = s * coeffs.b;
        for (std::size_t iz = 0; iz < n; ++iz)
            shift[si * n + iz] = std::polar(1.0 / static_cast<double>(cells), -k[iz] * g * dt);
        for (std::size_t iz = 0; iz < n; ++iz) {
            const double z = spec.coord(iz);
            for (std::size_t ix = 0; ix < n; ++ix) {
                const double x = spec.coord(ix);
                const double ph = coeffs.c * s * dt - a * x * x * dt -
                                  a * (z * z * dt - g * z * dt * dt + g * g * dt * dt * dt / 3.0);
                phase[si * cells + iz * n + ix] = std::polar(1.0, ph);
            }
        }
    }

    SpinorGrid out = psi;
    cplx* d = out.data.data();
    for (std::size_t step = 0; step < n_steps; ++step) {
        plan.forward(out.data);
        for (int si = 0; si < 2; ++si)
            for (std::size_t iz = 0; iz < n; ++iz) {
                const cplx m = shift[si * n + iz];
                cplx* row = d + si * cells + iz * n;
                for (std::size_t ix = 0; ix < n; ++ix)
                    row[ix] *= m;
            }
        plan.backward(out.data);
        for (std::size_t i = 0; i < 2 * cells; ++i)
            d[i] *= phase[i];
    }
    return out;
}

/// 1D closed form in physical units for one sigma^z eigen-component: the profile over k_z is translated
/// by g t, g = s gamma B1 / 2, and multiplied by the phases of the uniform field and the kinetic term.
inline CVector textbook_propagate(const CVector& initial_profile, double k_origin, double k_step, int s,
                                  const PhysicalParams& params, const FieldConfig& field, double t)
{
    detail::require(s == 1 || s == -1, "textbook_propagate: s must be +1 or -1");
    detail::require(k_step > 0.0, "textbook_propagate: k_step must be > 0");
    const std::size_t n = initial_profile.size();
    detail::require(n >= 2, "textbook_propagate: profile needs at least two points");
    if (t == 0.0)
        return initial_profile;

    const double g = s * params.gamma * field.b1 / 2.0;
    const double hm = params.hbar_over_mass();

    // phi(k - g t, 0) by a spectral shift
    FftPlan1D plan(n);
    CVector out = initial_profile;
    plan.forward(out);
    for (std::size_t m = 0; m < n; ++m)
        out[m] *= std::polar(1.0 / static_cast<double>(n), -fft_wavenumber(m, n, k_step) * g * t);
    plan.backward(out);

    const double global = s * t * params.gamma * field.b0 / 2.0 - hm * g * g * t * t * t / 24.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double k = k_origin + static_cast<double>(j) * k_step;
        const double kin = k - g * t / 2.0;
        out[j] *= std::polar(1.0, global - hm * t * kin * kin / 2.0);
    }
    return out;
}

} // namespace sgsim
