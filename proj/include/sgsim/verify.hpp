#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sgsim/ensemble.hpp"
#include "sgsim/event.hpp"
#include "sgsim/newton.hpp"
#include "sgsim/params.hpp"
#include "sgsim/pauli.hpp"
#include "sgsim/stats.hpp"

namespace sgsim {

struct VerifyCheck
{
    std::string name;
    bool ok{false};
    std::string detail;
};

namespace detail {
inline double rel(double got, double want)
{
    return std::abs(got - want) / std::abs(want);
}

template <class... Args>
std::string fmt(Args&&... args)
{
    std::ostringstream o;
    o.precision(6);
    (o << ... << args);
    return o.str();
}
} // namespace detail

/// Quick analytic-oracle suite: scales, coefficients, the constant-force and large-B0 trajectories,
/// the closed-form quantum propagation and the event-model Malus law.
inline std::vector<VerifyCheck> verify_suite()
{
    using detail::fmt;
    using detail::rel;
    std::vector<VerifyCheck> out;
    const FieldConfig field;
    const Preset n = preset(Species::Neutron);
    const Preset ag = preset(Species::ImaginarySilver);
    const Scales sn = derive_scales(n.params, field, n.beam);
    const Scales sa = derive_scales(ag.params, field, ag.beam);

    {
        const double e = std::max({rel(sn.t_star, 2.02e-3), rel(sn.v_star, 3.50), rel(sn.z_star, 3.53e-3)});
        out.push_back({"neutron scales t*, v*, z*", e < 5e-3, fmt("max rel err ", e)});
        const double f = std::max({rel(sa.t_star, 1.48e-3), rel(sa.v_star, 1.42e-3), rel(sa.z_star, 1.05e-6)});
        out.push_back({"silver scales t*, v*, z*", f < 5e-3, fmt("max rel err ", f)});
    }
    {
        const DimensionlessCoeffs kn = dimensionless_coeffs(n.params, field, sn.t_star, sn.v_star);
        const DimensionlessCoeffs ka = dimensionless_coeffs(ag.params, field, sa.t_star, sa.v_star);
        const double e = std::max({rel(kn.a, 196540), rel(kn.c, -185339), rel(ka.a, 2.53618), rel(ka.c, -8053.19)});
        out.push_back({"dimensionless coefficients", e < 5e-3 && kn.b == -1.0 && ka.b == -1.0,
                       fmt("max rel err ", e, ", b = ", kn.b, " / ", ka.b)});
    }
    {
        double e = 0.0;
        for (int sign : {1, -1}) {
            ParticleState s;
            s.velocity = {0, n.beam.v_y, 0};
            s.spin = {0, 0, 0.5 * sign};
            const ParticleState x = trace_particle(s, 1e-8, n.params, field);
            e = std::max({e, rel(x.velocity.z, -sign * sn.v_star), rel(x.position.z, -sign * sn.z_star)});
        }
        out.push_back({"constant-force trajectory", e < 1e-6, fmt("max rel err ", e)});
    }
    {
        EnsembleSpec spec;
        spec.n = 64;
        spec.tau = 1e-8;
        spec.seed = 11;
        const auto rec = run_ensemble(spec, n.params, field, n.beam);
        double e = 0.0;
        for (const ExitRecord& r : rec) {
            const Vec3 s0 = initial_state(r.particle_id, spec.seed, spec.init, n.beam).spin;
            const auto o = large_b0_oracle(sn.t_star, s0, {}, n.params, field);
            e = std::max({e, std::abs(r.vx - o.vx) / sn.v_star, std::abs(r.vz - o.vz) / sn.v_star});
        }
        out.push_back({"large-B0 trajectory oracle", e < 1e-3, fmt("max |dv|/v* ", e)});
    }
    {
        FieldConfig f = field;
        f.b0 = 0.01;
        const DimensionlessCoeffs k = dimensionless_coeffs(ag.params, f, sa.t_star, sa.v_star);
        const GridSpec g{256, 4.0};
        const SpinState spin{std::numbers::pi / 2, 0.3};
        const SpinorGrid psi0 = init_state(spin, 0.1, g);
        const double amp = std::abs(psi0.up()[(g.points / 2) * g.points + g.points / 2]) / std::abs(spin.up());
        PropagateOptions opt;
        opt.hamiltonian.sigma_x = false;
        const SpinorGrid cheb = chebyshev_propagate(psi0, k, 1.0, opt);
        const SpinorGrid exact = textbook_closed_form(g, k, 1.0, [&](double x, double z) {
            const double gz = amp * std::exp(-(x * x + z * z) / 0.02);
            return std::pair{spin.up() * gz, spin.down() * gz};
        });
        double e = 0.0;
        for (std::size_t i = 0; i < cheb.data.size(); ++i)
            e = std::max(e, std::abs(cheb.data[i] - exact.data[i]));
        const double drift = std::abs(observables(cheb).norm - 1.0);
        out.push_back({"quantum closed form without sigma^x", e < 1e-8 && drift < 1e-12,
                       fmt("max err ", e, ", norm drift ", drift)});
    }
    {
        const double xi = std::numbers::pi / 3;
        EnsembleSpec spec;
        spec.n = 4000;
        spec.tau = 1e-7;
        spec.seed = 5;
        spec.init = {false, xi, 0.0};
        const auto rec = run_event_ensemble(spec, n.params, field, n.beam);
        double plus = 0.0;
        for (const ExitRecord& r : rec)
            plus += r.vz < 0.0 ? 1.0 : 0.0;
        const double z = binomial_z(plus / static_cast<double>(rec.size()), malus_probability(xi, 1),
                                    static_cast<double>(rec.size()));
        out.push_back({"event-model Malus law", std::abs(z) < 3.0, fmt("z = ", z)});
    }
    return out;
}

} // namespace sgsim
