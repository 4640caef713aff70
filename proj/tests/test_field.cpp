#include "catch_amalgamated.hpp"

#include "sgsim/field.hpp"

using namespace sgsim;
using Catch::Approx;

namespace {
FieldConfig magnet()
{
    return FieldConfig{1.0, 300.0, 1.0, 1.8};
}
} // namespace

TEST_CASE("field inside and outside the slab", "[field]")
{
    const FieldConfig f = magnet();
    CHECK(field_at({0, 1.4, 0}, f) == Vec3{0, 0, 1});
    const Vec3 b = field_at({1e-3, 1.4, 2e-3}, f);
    CHECK(b.x == Approx(-0.3));
    CHECK(b.y == 0.0);
    CHECK(b.z == Approx(1.6));

    CHECK(field_at({1e-3, 0.5, 0}, f) == Vec3{});
    CHECK(field_at({1e-3, 2.0, 0}, f) == Vec3{});
    // half-open slab
    CHECK(field_at({0, 1.0, 0}, f) == Vec3{0, 0, 1});
    CHECK(field_at({0, 1.8, 0}, f) == Vec3{});
}

TEST_CASE("field is divergence and curl free", "[field]")
{
    const FieldConfig f = magnet();
    for (const Vec3 p : {Vec3{0, 1.4, 0}, Vec3{2e-3, 1.1, -1e-3}, Vec3{-5e-3, 1.7, 4e-3}}) {
        const auto [div, curl] = divergence_and_curl_fd(p, f, 1e-6);
        CHECK(std::abs(div) < 1e-9);
        CHECK(norm(curl) < 1e-9);
    }
    CHECK_THROWS_AS(divergence_and_curl_fd({0, 1.8 - 5e-7, 0}, f, 1e-6), RangeError);
    CHECK_THROWS_AS(divergence_and_curl_fd({0, 1.4, 0}, f, 0.0), RangeError);
}

TEST_CASE("force on a magnetic moment", "[field]")
{
    const PhysicalParams n{1.67e-27, -1.8330e8};
    const FieldConfig f = magnet();
    const double hm = n.hbar_over_mass();

    const Vec3 up = force_on_moment({0, 0, 0.5}, n, f, true) * hm;
    CHECK(up.z == Approx(-1.73e3).epsilon(0.005));
    CHECK(up.x == 0.0);

    const Vec3 sx = force_on_moment({0.5, 0, 0}, n, f, true) * hm;
    CHECK(sx.x == Approx(1.73e3).epsilon(0.005));
    CHECK(sx.z == 0.0);

    CHECK(force_on_moment({0.3, 0.1, 0.2}, n, f, false) == Vec3{});
}
