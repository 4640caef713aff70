#include "catch_amalgamated.hpp"

#include "sgsim/pauli.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace sgsim;
using Catch::Approx;

namespace {
constexpr double kPi = std::numbers::pi;

const Preset kSilver = preset(Species::ImaginarySilver);
const Preset kNeutron = preset(Species::Neutron);

DimensionlessCoeffs silver_coeffs(double b0)
{
    FieldConfig f;
    f.b0 = b0;
    const Scales s = derive_scales(kSilver.params, f, kSilver.beam);
    return dimensionless_coeffs(kSilver.params, f, s.t_star, s.v_star);
}

double max_abs_diff(const SpinorGrid& p, const SpinorGrid& q)
{
    double m = 0.0;
    for (std::size_t i = 0; i < p.data.size(); ++i)
        m = std::max(m, std::abs(p.data[i] - q.data[i]));
    return m;
}

cplx inner(const CVector& p, const CVector& q)
{
    cplx s{};
    for (std::size_t i = 0; i < p.size(); ++i)
        s += std::conj(p[i]) * q[i];
    return s;
}

SpinorGrid random_spinor(const GridSpec& spec, unsigned seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    SpinorGrid psi(spec);
    for (auto& v : psi.data)
        v = {nd(gen), nd(gen)};
    return psi;
}
} // namespace

TEST_CASE("grid spec", "[pauli]")
{
    GridSpec g{256, 2.0};
    CHECK(g.delta() == Approx(4.0 / 256));
    CHECK(g.coord(0) == -2.0);
    CHECK(g.coord(128) == 0.0);
    CHECK_NOTHROW(g.validate());
    CHECK_THROWS_AS((GridSpec{100, 2.0}.validate()), RangeError);
    CHECK_THROWS_AS((GridSpec{32, 2.0}.validate()), RangeError);
    CHECK_THROWS_AS((GridSpec{64, 0.0}.validate()), RangeError);
}

TEST_CASE("initial state", "[pauli]")
{
    const GridSpec g{128, 2.0};
    const SpinorGrid up = init_state({0.0, 0.0}, 0.1, g);
    for (const cplx& v : up.down())
        CHECK(v == cplx{});
    CHECK(observables(up).norm == Approx(1.0).margin(1e-10));

    const SpinorGrid half = init_state({kPi / 2, kPi / 4}, 0.1, g);
    const Observables o = observables(half);
    CHECK(o.norm == Approx(1.0).margin(1e-10));
    CHECK(o.weight_up == Approx(0.5).margin(1e-12));
    CHECK(o.weight_down == Approx(0.5).margin(1e-12));
    CHECK(std::abs(o.mean_x_up) < 1e-10);
    CHECK(std::abs(o.mean_z_down) < 1e-10);

    // relative phase exp(i alpha) between the components
    const std::size_t c = 64 * 128 + 64;
    CHECK(std::arg(half.down()[c] / half.up()[c]) == Approx(kPi / 4));

    CHECK_THROWS_AS(init_state({}, 0.08, g), RangeError);
    CHECK_THROWS_AS(init_state({}, 0.0, g), RangeError);
}

TEST_CASE("hamiltonian: diagonal spin term", "[pauli]")
{
    const GridSpec g{64, 2.0};
    const SpinorGrid psi = random_spinor(g, 1);
    const SpinorGrid h = apply_hamiltonian(psi, {0.0, 0.0, 1.0});
    for (std::size_t i = 0; i < g.cells(); ++i) {
        CHECK(std::abs(h.up()[i] + psi.up()[i]) < 1e-12);
        CHECK(std::abs(h.down()[i] - psi.down()[i]) < 1e-12);
    }
}

TEST_CASE("hamiltonian: plane-wave eigenvalues of the derivative terms", "[pauli]")
{
    const GridSpec g{64, 2.0};
    const double len = 2.0 * g.half_width;
    const int nz = 3;
    const int nx = -5;
    const double kz = 2 * kPi * nz / len;
    const double kx = 2 * kPi * nx / len;
    SpinorGrid psi(g);
    for (std::size_t iz = 0; iz < g.points; ++iz)
        for (std::size_t ix = 0; ix < g.points; ++ix)
            psi.up()[iz * g.points + ix] = std::polar(1.0, kz * g.coord(iz) + kx * g.coord(ix));

    // -b sigma^z p_z on the up component: p_z -> -kz
    const double b = -1.0;
    HamiltonianOptions no_sx{false};
    const SpinorGrid h = apply_hamiltonian(psi, {0.0, b, 0.0}, no_sx);
    for (std::size_t i = 0; i < g.cells(); ++i) {
        CHECK(std::abs(h.up()[i] - (b * kz) * psi.up()[i]) < 1e-11);
        CHECK(std::abs(h.down()[i]) < 1e-11);
    }

    // b sigma^x p_x moves the plane wave into the down component with eigenvalue -b kx
    const SpinorGrid hx = apply_hamiltonian(psi, {0.0, b, 0.0});
    for (std::size_t i = 0; i < g.cells(); ++i)
        CHECK(std::abs(hx.down()[i] - (-b * kx) * psi.up()[i]) < 1e-11);
}

TEST_CASE("hamiltonian is hermitian", "[pauli]")
{
    const GridSpec g{64, 2.0};
    const SpinorGrid phi = random_spinor(g, 2);
    const SpinorGrid psi = random_spinor(g, 3);
    const DimensionlessCoeffs k{2.53618, -1.0, -80.5};
    const SpinorGrid hphi = apply_hamiltonian(phi, k);
    const SpinorGrid hpsi = apply_hamiltonian(psi, k);
    const cplx lhs = inner(phi.data, hpsi.data);
    const cplx rhs = inner(hphi.data, psi.data);
    CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-10);
}

TEST_CASE("spectral bound encloses the spectrum", "[pauli]")
{
    const GridSpec g{64, 2.0};
    const DimensionlessCoeffs k{2.53618, -1.0, -80.5};
    PauliOperator h(g, k);
    const SpectralBounds sb = h.bounds();
    // power iteration on H - centre gives the largest |E - centre|
    SpinorGrid v = random_spinor(g, 4);
    CVector w(v.data.size());
    double lambda = 0.0;
    for (int it = 0; it < 300; ++it) {
        const double n2 = h.affine(v.data, w, 1.0, sb.centre(), 0.0, nullptr, cplx{});
        double v2 = 0.0;
        for (const cplx& x : v.data)
            v2 += std::norm(x);
        lambda = std::sqrt(n2 / v2);
        const double s = 1.0 / std::sqrt(n2);
        for (std::size_t i = 0; i < w.size(); ++i)
            v.data[i] = w[i] * s;
    }
    CHECK(lambda <= sb.half_range());
    CHECK(lambda > 0.5 * sb.half_range());
}

TEST_CASE("chebyshev: zero time is the identity", "[pauli]")
{
    const GridSpec g{64, 2.0};
    const SpinorGrid psi = init_state({1.0, 0.3}, 0.2, g);
    const SpinorGrid out = chebyshev_propagate(psi, silver_coeffs(1.0), 0.0);
    CHECK(out.data == psi.data);
    CHECK_THROWS_AS(chebyshev_propagate(psi, silver_coeffs(1.0), -1.0), RangeError);
}

TEST_CASE("chebyshev matches the closed form without the sigma^x term", "[pauli]")
{
    const GridSpec g{256, 4.0};
    const DimensionlessCoeffs k = silver_coeffs(0.01);
    const SpinState spin{kPi / 2, 0.0};
    const double sigma = 0.1;
    const SpinorGrid psi0 = init_state(spin, sigma, g);
    const double amp = std::abs(psi0.up()[(g.points / 2) * g.points + g.points / 2]) / spin.up().real();

    PropagateOptions opt;
    opt.hamiltonian.sigma_x = false;
    PropagationReport rep;
    const double t = 1.0;
    const SpinorGrid cheb = chebyshev_propagate(psi0, k, t, opt, &rep);
    const SpinorGrid exact = textbook_closed_form(g, k, t, [&](double x, double z) {
        const double gz = amp * std::exp(-(x * x + z * z) / (2 * sigma * sigma));
        return std::pair{spin.up() * gz, spin.down() * gz};
    });
    CHECK(max_abs_diff(cheb, exact) < 1e-8);
    CHECK(std::abs(observables(cheb).norm - 1.0) < 1e-12);
    CHECK(rep.terms > 0);
    CHECK(rep.edge_fraction < 1e-6);
}

TEST_CASE("product formula agrees with chebyshev", "[pauli]")
{
    const GridSpec g{128, 2.0};
    const DimensionlessCoeffs k = silver_coeffs(1.0);
    const SpinorGrid psi0 = init_state({1.2, 0.4}, 0.1, g);
    PropagateOptions opt;
    opt.hamiltonian.sigma_x = false;
    const SpinorGrid cheb = chebyshev_propagate(psi0, k, 0.1, opt);
    const SpinorGrid prod = product_formula_propagate(psi0, k, 0.1, 10);
    CHECK(max_abs_diff(cheb, prod) < 1e-6);
    CHECK(product_formula_propagate(psi0, k, 0.0, 3).data == psi0.data);
}

TEST_CASE("ehrenfest drift of the spin components", "[pauli]")
{
    // Large c keeps the components apart; each drifts at b s.
    const GridSpec g{128, 2.0};
    const DimensionlessCoeffs k = silver_coeffs(0.1);
    const SpinorGrid psi0 = init_state({kPi / 2, 0.0}, 0.1, g);
    for (double t : {0.1, 0.25}) {
        const Observables o = observables(chebyshev_propagate(psi0, k, t));
        CHECK(o.mean_z_up == Approx(k.b * t).margin(1e-3));
        CHECK(o.mean_z_down == Approx(-k.b * t).margin(1e-3));
        CHECK(std::abs(o.norm - 1.0) < 1e-12);
    }
}

TEST_CASE("total drift follows the spin polarization at zero field", "[pauli]")
{
    // d<z>/dt = b <sigma^z>; for an unpolarized-in-z start the centre of mass stays put.
    const GridSpec g{128, 2.0};
    const DimensionlessCoeffs k = silver_coeffs(0.0);
    const SpinorGrid psi0 = init_state({kPi / 2, 0.0}, 0.1, g);
    const Observables o = observables(chebyshev_propagate(psi0, k, 0.3));
    const double mean_z = o.mean_z_up * o.weight_up + o.mean_z_down * o.weight_down;
    CHECK(std::abs(mean_z) < 1e-9);
    CHECK(std::abs(o.norm - 1.0) < 1e-12);
}

TEST_CASE("probability map", "[pauli]")
{
    const GridSpec g{64, 2.0};
    const SpinorGrid psi = init_state({kPi / 3, 0.0}, 0.2, g);
    const HistogramGrid h = probability_map(psi);
    CHECK(h.nx == 64);
    CHECK(h.in_range_total() == Approx(1.0).margin(1e-10));
    CHECK(h.x_center(32) == Approx(0.0).margin(1e-14));
    CHECK(h.z_center(0) == Approx(-2.0));
    const double up = probability_map(psi, ProbabilityComponent::Up).in_range_total();
    CHECK(up == Approx(std::pow(std::cos(kPi / 6), 2)));
    CHECK(probability_map(psi, ProbabilityComponent::Down, "v0").unit == "v0");
}

TEST_CASE("grid guard", "[pauli]")
{
    const FieldConfig f;
    const Scales sn = derive_scales(kNeutron.params, f, kNeutron.beam);
    const DimensionlessCoeffs full = dimensionless_coeffs(kNeutron.params, f, sn.t_star, sn.v_star);
    const DimensionlessCoeffs reduced = dimensionless_coeffs(kNeutron.params, f, sn.t_star / 10, sn.v_star / 10);

    CHECK(check_grid({1024, 4.0}, full).verdict == GridVerdict::Reject);
    CHECK(check_grid({1024, 2.0}, reduced).verdict == GridVerdict::Warn);
    CHECK(check_grid({512, 4.0}, silver_coeffs(1.0)).verdict == GridVerdict::Warn);
    CHECK(check_grid({4096, 1.0}, DimensionlessCoeffs{0.01, -1, 0}).verdict == GridVerdict::Ok);

    const SpinorGrid psi = init_state({}, 0.1, GridSpec{128, 2.0});
    CHECK_THROWS_AS(chebyshev_propagate(psi, full, 0.01), RangeError);

    PropagationReport rep;
    chebyshev_propagate(psi, silver_coeffs(0.0), 0.01, {}, &rep);
    CHECK(rep.warnings.size() == 1);
}

TEST_CASE("boundary warning", "[pauli]")
{
    const GridSpec g{64, 1.0};
    const SpinorGrid psi = init_state({}, 0.1, g);
    PropagationReport rep;
    // the up component drifts to z = -0.9, inside the edge band
    chebyshev_propagate(psi, {0.0, -1.0, 0.0}, 0.9, {}, &rep);
    CHECK(rep.edge_fraction > 1e-6);
    CHECK(rep.warnings.size() == 1);
}

TEST_CASE("textbook propagation in physical units", "[pauli]")
{
    const std::size_t n = 1024;
    const double dk = 1e3; // 1/m
    const double k0 = -dk * n / 2;
    const double width = 40 * dk;
    CVector phi(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double k = k0 + j * dk;
        phi[j] = std::exp(-k * k / (2 * width * width));
    }
    const FieldConfig f;
    const PhysicalParams& p = kNeutron.params;
    for (int s : {1, -1}) {
        const double g = s * p.gamma * f.b1 / 2.0;
        const double t = 150 * dk / std::abs(g);
        const CVector out = textbook_propagate(phi, k0, dk, s, p, f, t);
        const long shift = std::lround(g * t / dk);
        double num = 0, den = 0, maxerr = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const long src = static_cast<long>(j) - shift;
            if (src >= 0 && src < static_cast<long>(n))
                maxerr = std::max(maxerr, std::abs(std::norm(out[j]) - std::norm(phi[src])));
            num += (k0 + j * dk) * std::norm(out[j]);
            den += std::norm(out[j]);
        }
        CHECK(maxerr < 1e-12);
        CHECK(num / den == Approx(g * t).margin(1e-6 * dk));
    }
    CHECK(textbook_propagate(phi, k0, dk, 1, p, f, 0.0) == phi);
    CHECK_THROWS_AS(textbook_propagate(phi, k0, dk, 0, p, f, 1.0), RangeError);
}
