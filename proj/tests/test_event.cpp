#include "catch_amalgamated.hpp"

#include "sgsim/ensemble.hpp"
#include "sgsim/event.hpp"
#include "sgsim/stats.hpp"

#include <numbers>

using namespace sgsim;
using Catch::Approx;

namespace {
const PhysicalParams kNeutron = preset(Species::Neutron).params;
const BeamConfig kBeam = preset(Species::Neutron).beam;
constexpr double kPi = std::numbers::pi;
} // namespace

TEST_CASE("malus probability", "[event]")
{
    CHECK(malus_probability(0.0, 1) == 1.0);
    CHECK(malus_probability(0.0, -1) == 0.0);
    CHECK(malus_probability(kPi / 2, 1) == Approx(0.5));
    CHECK(malus_probability(kPi / 3, 1) == Approx(0.75));
    CHECK(malus_probability(kPi / 3, -1) == Approx(0.25));
    CHECK(malus_probability(1.1, 1) + malus_probability(1.1, -1) == Approx(1.0));
    CHECK_THROWS_AS(malus_probability(1.0, 0), RangeError);
}

TEST_CASE("one-time alignment rule", "[event]")
{
    const Vec3 b{0.0, 0.0, 2.0};
    for (const double r : {-0.5, 0.0, 0.4999, 0.5})
        CHECK(align_spin_once({0, 0, 0.5}, b, r) == Vec3{0, 0, 0.5});
    // ties count as +
    CHECK(align_spin_once({0.5, 0, 0}, b, 0.0) == Vec3{0, 0, 0.5});
    CHECK(align_spin_once({0.5, 0, 0}, b, 1e-12) == Vec3{0, 0, -0.5});
    const Vec3 tilted = align_spin_once({0.1, 0.2, 0.3}, {3, 0, -4}, 0.49);
    CHECK(norm(tilted) == Approx(0.5));
    CHECK(tilted.x == Approx(-0.3));
    CHECK_THROWS_AS(align_spin_once({0, 0, 0.5}, {}, 0.0), RangeError);

    // threshold rule integrates to cos^2(xi/2)
    const double xi = kPi / 3;
    const Vec3 s = 0.5 * Vec3{std::sin(xi), 0, std::cos(xi)};
    const int n = 100000;
    int plus = 0;
    for (int i = 0; i < n; ++i) {
        const double r = ParticleStream(3, static_cast<std::uint64_t>(i)).uniform2(draw::kAlignment)[0] - 0.5;
        plus += align_spin_once(s, b, r).z > 0 ? 1 : 0;
    }
    CHECK(binomial_z(double(plus) / n, 0.75, n) < 3.0);
}

TEST_CASE("disabled alignment reproduces the classical run bit for bit", "[event][ensemble]")
{
    EnsembleSpec spec;
    spec.n = 300;
    spec.seed = 21;
    BeamConfig beam = kBeam;
    beam.sigma_v = 0.05;
    for (const double b0 : {1.0, 1e-5}) {
        const FieldConfig f{b0, 300.0, 1.0, 1.8};
        CHECK(run_event_ensemble(spec, kNeutron, f, beam, false) == run_ensemble(spec, kNeutron, f, beam));
    }
}

TEST_CASE("event ensemble splits by the Malus law", "[event][ensemble]")
{
    const FieldConfig f{1.0, 300.0, 1.0, 1.8};
    const double vs = derive_scales(kNeutron, f, kBeam).v_star;
    EnsembleSpec spec;
    spec.n = 2000;
    spec.seed = 4;
    spec.init = InitSpec{false, kPi / 3, 0.0};
    const auto rec = run_event_ensemble(spec, kNeutron, f, kBeam);
    int minus = 0;
    for (const auto& r : rec) {
        // aligned spins travel the full constant-force path
        CHECK(std::abs(std::abs(r.vz) - vs) < 1e-3 * vs);
        minus += r.vz < 0 ? 1 : 0;
    }
    CHECK(binomial_z(double(minus) / spec.n, 0.75, spec.n) < 3.0);

    spec.init = InitSpec{};
    spec.n = 1000;
    spec.threads = 1;
    const auto one = run_event_ensemble(spec, kNeutron, f, kBeam);
    spec.threads = 4;
    CHECK(run_event_ensemble(spec, kNeutron, f, kBeam) == one);
}
