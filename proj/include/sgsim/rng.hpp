#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sgsim {

/// Philox4x32-10 counter-based generator (Salmon et al.), stateless: every
/// (key, counter) pair maps to an independent block of four 32-bit words.
class Philox4x32
{
  public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key)
    {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

  private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Per-particle random stream: draw k of particle id is a pure function of (seed, id, k).
class ParticleStream
{
  public:
    ParticleStream(std::uint64_t seed, std::uint64_t particle_id) : seed_(seed), id_(particle_id) {}

    /// Two doubles uniform in [0, 1) from draw index k.
    std::array<double, 2> uniform2(std::uint32_t k) const
    {
        const auto w = Philox4x32::block(
            {static_cast<std::uint32_t>(id_), static_cast<std::uint32_t>(id_ >> 32), k, 0u},
            {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
        return {to_unit(w[0], w[1]), to_unit(w[2], w[3])};
    }

    /// Two independent standard normals from draw index k (Box-Muller).
    std::array<double, 2> normal2(std::uint32_t k) const
    {
        const auto u = uniform2(k);
        const double r = std::sqrt(-2.0 * std::log1p(-u[0])); // 1-u in (0,1]
        const double phi = 2.0 * std::numbers::pi * u[1];
        return {r * std::cos(phi), r * std::sin(phi)};
    }

  private:
    static double to_unit(std::uint32_t hi, std::uint32_t lo)
    {
        const std::uint64_t bits = (std::uint64_t{hi} << 32 | lo) >> 11;
        return static_cast<double>(bits) * 0x1.0p-53;
    }

    std::uint64_t seed_;
    std::uint64_t id_;
};

/// Draw indices of the per-particle stream.
namespace draw {
inline constexpr std::uint32_t kAlignment = 0;
inline constexpr std::uint32_t kSpin = 1;
inline constexpr std::uint32_t kPosition = 2;
inline constexpr std::uint32_t kVelocity = 3;
} // namespace draw

} // namespace sgsim
