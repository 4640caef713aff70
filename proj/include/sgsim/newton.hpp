#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

#include "sgsim/error.hpp"
#include "sgsim/field.hpp"
#include "sgsim/params.hpp"
#include "sgsim/rng.hpp"
#include "sgsim/vec3.hpp"

namespace sgsim {

struct ParticleState
{
    Vec3 position; ///< m
    Vec3 velocity; ///< m/s
    Vec3 spin;     ///< |spin| = 1/2
};

struct ExitRecord
{
    double vx{0.0}; ///< m/s
    double vz{0.0}; ///< m/s
    Vec3 spin;
    std::uint64_t particle_id{0};

    friend bool operator==(const ExitRecord&, const ExitRecord&) = default;
};

struct RotationMatrix
{
    std::array<std::array<double, 3>, 3> m{};

    Vec3 operator*(const Vec3& v) const
    {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z, m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }

    static RotationMatrix identity()
    {
        RotationMatrix r;
        r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
        return r;
    }
};

/// Exact solution operator of dS/dt = gamma S x B over a time tau for constant B.
inline RotationMatrix rotation_matrix(const Vec3& b_field, double gamma, double tau)
{
    const double nb = norm(b_field);
    const double omega = std::abs(gamma) * nb;
    if (omega == 0.0 || tau == 0.0)
        return RotationMatrix::identity();
    const double sign = gamma > 0.0 ? 1.0 : -1.0;
    const Vec3 n{sign * b_field.x / nb, sign * b_field.y / nb, sign * b_field.z / nb};
    const double h = std::sin(0.5 * tau * omega);
    const double one_minus_c = 2.0 * h * h;
    const double c = 1.0 - one_minus_c;
    const double s = std::sin(tau * omega);
    const double nv[3] = {n.x, n.y, n.z};

    // n n^T + c (1 - n n^T) - s [n]x
    RotationMatrix r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r.m[i][j] = nv[i] * nv[j] * one_minus_c + (i == j ? c : 0.0);
    r.m[0][1] += s * n.z;
    r.m[0][2] -= s * n.y;
    r.m[1][0] -= s * n.z;
    r.m[1][2] += s * n.x;
    r.m[2][0] += s * n.y;
    r.m[2][1] -= s * n.x;
    return r;
}

namespace detail {
/// Field inside the slab, ignoring the y gate.
inline Vec3 slab_field(double x, double z, const FieldConfig& config)
{
    return {-x * config.b1, 0.0, config.b0 + z * config.b1};
}

inline Vec3 acceleration(const Vec3& spin, const PhysicalParams& params, const FieldConfig& config, bool inside)
{
    return force_on_moment(spin, params, config, inside) * params.hbar_over_mass();
}
} // namespace detail

/// One velocity-Verlet step with exact spin rotation. Whether the field acts
/// during the step is decided by the position at the start of the step; the
/// ensemble drivers shorten the final step so that it ends exactly on y_end.
inline ParticleState verlet_step(const ParticleState& state, double tau, const PhysicalParams& params,
                                 const FieldConfig& config)
{
    detail::require(tau > 0.0, "verlet_step: tau must be > 0");
    const bool inside = in_field_region(state.position.y, config);

    ParticleState next = state;
    next.velocity += detail::acceleration(state.spin, params, config, inside) * (0.5 * tau);
    next.position += next.velocity * tau;
    if (inside)
        next.spin = rotation_matrix(detail::slab_field(next.position.x, next.position.z, config), params.gamma, tau) *
                    next.spin;
    next.velocity += detail::acceleration(next.spin, params, config, inside) * (0.5 * tau);
    return next;
}

/// Field-free flight from y = 0 to the magnet entrance followed by stepping
/// through the slab; returns the state at y = y_end.
template <class StepHook>
ParticleState trace_particle(ParticleState state, double tau, const PhysicalParams& params,
                             const FieldConfig& config, StepHook&& hook)
{
    detail::require(tau > 0.0, "trace_particle: tau must be > 0");
    const double vy = state.velocity.y;
    detail::require(vy > 0.0, "trace_particle: v_y must be > 0");
    detail::require(state.position.y <= config.y_start, "trace_particle: particle must start before the magnet");

    const double t_pre = (config.y_start - state.position.y) / vy;
    state.position.x += state.velocity.x * t_pre;
    state.position.z += state.velocity.z * t_pre;
    state.position.y = config.y_start;

    const double t_field = config.length() / vy;
    const auto n_full = static_cast<std::uint64_t>(std::floor(t_field / tau));
    const double rest = t_field - static_cast<double>(n_full) * tau;
    for (std::uint64_t k = 0; k < n_full; ++k) {
        hook(state);
        state = verlet_step(state, tau, params, config);
        state.position.y = config.y_start + static_cast<double>(k + 1) * tau * vy;
    }
    if (rest > 1e-12 * tau) {
        hook(state);
        state = verlet_step(state, rest, params, config);
    }
    state.position.y = config.y_end;
    return state;
}

inline ParticleState trace_particle(const ParticleState& state, double tau, const PhysicalParams& params,
                                    const FieldConfig& config)
{
    return trace_particle(state, tau, params, config, [](ParticleState&) {});
}

/// Direction uniform on the sphere, length 1/2.
inline Vec3 sample_uniform_sphere(const ParticleStream& stream, std::uint32_t draw_index = draw::kSpin)
{
    const auto u = stream.uniform2(draw_index);
    const double cos_t = 2.0 * u[0] - 1.0;
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    const double phi = 2.0 * std::numbers::pi * u[1];
    return {0.5 * sin_t * std::cos(phi), 0.5 * sin_t * std::sin(phi), 0.5 * cos_t};
}

/// Spin pointing along polar angle theta and azimuth alpha.
inline Vec3 spin_from_angles(double theta, double alpha)
{
    return {0.5 * std::sin(theta) * std::cos(alpha), 0.5 * std::sin(theta) * std::sin(alpha), 0.5 * std::cos(theta)};
}

struct InitSpec
{
    bool random_spin{true};
    double theta{0.0}; ///< fixed-spin polar angle
    double alpha{0.0}; ///< fixed-spin azimuth
};

/// Source state of a particle at y = 0, a pure function of (seed, particle_id).
inline ParticleState initial_state(std::uint64_t particle_id, std::uint64_t seed, const InitSpec& init,
                                   const BeamConfig& beam)
{
    const ParticleStream stream(seed, particle_id);
    ParticleState s;
    s.spin = init.random_spin ? sample_uniform_sphere(stream) : spin_from_angles(init.theta, init.alpha);
    s.velocity.y = beam.v_y;
    if (beam.sigma_x > 0.0) {
        const auto g = stream.normal2(draw::kPosition);
        s.position.x = beam.sigma_x * g[0];
        s.position.z = beam.sigma_x * g[1];
    }
    if (beam.sigma_v > 0.0) {
        const auto g = stream.normal2(draw::kVelocity);
        s.velocity.x = beam.sigma_v * g[0];
        s.velocity.z = beam.sigma_v * g[1];
    }
    return s;
}

/// On-axis particle with spin +-1/2 along z: constant force motion.
inline std::pair<double, double> analytic_constant_force(double t, int spin_sign, const PhysicalParams& params,
                                                         const FieldConfig& config)
{
    detail::require(t >= 0.0, "analytic_constant_force: t must be >= 0");
    detail::require(spin_sign == 1 || spin_sign == -1, "analytic_constant_force: spin_sign must be +1 or -1");
    const double accel = params.hbar_over_mass() * params.gamma * config.b1 * 0.5 * spin_sign;
    return {accel * t, 0.5 * accel * t * t};
}

struct LargeB0Trajectory
{
    double vx{0.0}; ///< m/s
    double x{0.0};  ///< m
    double vz{0.0}; ///< m/s
};

/// Large-B0 limit in which the B1 terms are dropped from the precession.
inline LargeB0Trajectory large_b0_oracle(double t, const Vec3& initial_spin, const Vec3& initial_v,
                                         const PhysicalParams& params, const FieldConfig& config, double x0 = 0.0)
{
    detail::require(config.b0 > 0.0, "large_b0_oracle: B0 must be > 0");
    const double hm = params.hbar_over_mass();
    const double beta = hm * config.b1 / config.b0;
    const double omega = params.gamma * config.b0;
    const double beta_p = beta / omega;
    const double s = std::sin(omega * t);
    const double one_minus_c = 2.0 * std::pow(std::sin(0.5 * omega * t), 2);

    LargeB0Trajectory r;
    r.vx = initial_v.x - beta * initial_spin.x * s - beta * initial_spin.y * one_minus_c;
    r.x = x0 + initial_v.x * t - beta_p * initial_spin.x * one_minus_c - beta * initial_spin.y * t +
          beta_p * initial_spin.y * s;
    r.vz = initial_v.z + hm * params.gamma * config.b1 * initial_spin.z * t;
    return r;
}

} // namespace sgsim
