#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "sgsim/error.hpp"
#include "sgsim/kernel.hpp"
#include "sgsim/newton.hpp"
#include "sgsim/params.hpp"
#include "sgsim/rng.hpp"

namespace sgsim {

struct EnsembleSpec
{
    std::size_t n{1};
    InitSpec init;
    double tau{1e-8};       ///< s
    std::uint64_t seed{0};
    unsigned threads{0};    ///< 0 = hardware concurrency
};

inline unsigned resolve_threads(unsigned requested)
{
    if (requested > 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

struct StepSchedule
{
    std::uint64_t full_steps{0};
    double last_tau{0.0}; ///< 0 when the slab is an integer number of steps
};

inline StepSchedule make_schedule(const FieldConfig& field, const BeamConfig& beam, double tau)
{
    const double t_field = field.length() / beam.v_y;
    StepSchedule s;
    s.full_steps = static_cast<std::uint64_t>(std::floor(t_field / tau));
    const double rest = t_field - static_cast<double>(s.full_steps) * tau;
    s.last_tau = rest > 1e-12 * tau ? rest : 0.0;

    const double budget = std::ceil(4.0 * t_field / tau);
    if (static_cast<double>(s.full_steps) + (s.last_tau > 0.0 ? 1.0 : 0.0) > budget)
        throw EngineError("step budget of 4 t*/tau exceeded; particles would not exit the magnet");
    return s;
}

template <bool Event>
std::vector<ExitRecord> run_lanes(const EnsembleSpec& spec, const PhysicalParams& params, const FieldConfig& field,
                                  const BeamConfig& beam, bool align)
{
    require(spec.n >= 1, "ensemble: n must be >= 1");
    require(spec.tau > 0.0 && std::isfinite(spec.tau), "ensemble: tau must be > 0");
    require(field.y_start >= 0.0, "ensemble: the source sits at y = 0, so y_start must be >= 0");
    params.validate();
    field.validate();
    beam.validate();

    const StepSchedule schedule = make_schedule(field, beam, spec.tau);
    const kernel::Coeffs coeffs{params.gamma, field.b0, field.b1, params.hbar_over_mass() * params.gamma * field.b1};
    const double t_pre = field.y_start / beam.v_y;

    constexpr std::size_t W = kernel::kLanes;
    const std::size_t n_batches = (spec.n + W - 1) / W;
    std::vector<ExitRecord> out(spec.n);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        kernel::Lanes lanes;
        try {
            for (std::size_t b = next++; b < n_batches; b = next++) {
                for (std::size_t j = 0; j < W; ++j) {
                    const std::uint64_t id = std::min(b * W + j, spec.n - 1);
                    const ParticleState s = initial_state(id, spec.seed, spec.init, beam);
                    lanes.x[j] = s.position.x + s.velocity.x * t_pre;
                    lanes.z[j] = s.position.z + s.velocity.z * t_pre;
                    lanes.vx[j] = s.velocity.x;
                    lanes.vz[j] = s.velocity.z;
                    lanes.sx[j] = s.spin.x;
                    lanes.sy[j] = s.spin.y;
                    lanes.sz[j] = s.spin.z;
                    lanes.r[j] = ParticleStream(spec.seed, id).uniform2(draw::kAlignment)[0] - 0.5;
                    lanes.aligned[j] = (Event && align) ? 0.0 : 1.0;
                }
                bool pending = Event && align;
                const std::uint64_t n_steps = schedule.full_steps + (schedule.last_tau > 0.0 ? 1 : 0);
                for (std::uint64_t k = 0; k < n_steps; ++k) {
                    if (pending) {
                        kernel::align(lanes, coeffs);
                        pending = std::any_of(lanes.aligned, lanes.aligned + W, [](double a) { return a == 0.0; });
                    }
                    kernel::step(lanes, coeffs, k < schedule.full_steps ? spec.tau : schedule.last_tau);
                }

                for (std::size_t j = 0; j < W && b * W + j < spec.n; ++j) {
                    ExitRecord& rec = out[b * W + j];
                    rec.particle_id = b * W + j;
                    rec.vx = lanes.vx[j];
                    rec.vz = lanes.vz[j];
                    rec.spin = {lanes.sx[j], lanes.sy[j], lanes.sz[j]};
                    if (!std::isfinite(rec.vx) || !std::isfinite(rec.vz) || !is_finite(rec.spin))
                        throw EngineError("particle " + std::to_string(rec.particle_id) +
                                          " left the magnet with a non-finite state");
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure)
                failure = std::current_exception();
            next = n_batches;
        }
    };

    const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(spec.threads), n_batches));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
    return out;
}

} // namespace detail

/// Classical ensemble: sample sources, fly to the magnet, integrate through it, record exit velocities and spins.
inline std::vector<ExitRecord> run_ensemble(const EnsembleSpec& spec, const PhysicalParams& params,
                                            const FieldConfig& field, const BeamConfig& beam)
{
    return detail::run_lanes<false>(spec, params, field, beam, false);
}

/// Event-by-event ensemble: as run_ensemble, plus a one-time alignment of the
/// spin to +-B on the first in-field step. With align = false the alignment
/// stage is skipped and the result equals run_ensemble.
inline std::vector<ExitRecord> run_event_ensemble(const EnsembleSpec& spec, const PhysicalParams& params,
                                                  const FieldConfig& field, const BeamConfig& beam, bool align = true)
{
    return detail::run_lanes<true>(spec, params, field, beam, align);
}

} // namespace sgsim
