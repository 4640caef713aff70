#include "catch_amalgamated.hpp"

#include "sgsim/config.hpp"
#include "sgsim/io.hpp"
#include "sgsim/runner.hpp"

#include <filesystem>
#include <numbers>

using namespace sgsim;
namespace fs = std::filesystem;

namespace {
ConfigErrorCode code_of(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.code();
    }
    FAIL("expected a config error for: " << text);
    return ConfigErrorCode::Parse;
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("sgsim_test_" + name);
    fs::remove_all(p);
    return p;
}

std::size_t line_count(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}
} // namespace

TEST_CASE("parse a minimal config", "[config]")
{
    const RunConfig c = parse_config("model = newton\nspecies = neutron\nB0 = 1.0\nseed = 42");
    CHECK(c.model == Model::Newton);
    CHECK(c.species == Species::Neutron);
    CHECK(c.field.b0 == 1.0);
    CHECK(c.field.b1 == 300.0);
    CHECK(c.seed == 42);
    CHECK(c.beam.v_y == 395.6);
    CHECK(c.n == 10000);
    CHECK(c.tau == 1e-8);
}

TEST_CASE("comments, blanks and species defaults", "[config]")
{
    const RunConfig c = parse_config("# silver run\n\n  v_y = 500   # override\nspecies = silver\nmodel = quantum\n"
                                     "theta = 1.0471975511965976\ngrid_points = 128\n");
    CHECK(c.species == Species::ImaginarySilver);
    CHECK(c.beam.v_y == 500.0);
    CHECK(c.model == Model::Quantum);
    CHECK(c.grid.points == 128);
    CHECK(c.theta == Catch::Approx(std::numbers::pi / 3));
}

TEST_CASE("config errors", "[config]")
{
    CHECK(code_of("B0 = -1") == ConfigErrorCode::Range);
    CHECK(code_of("modle = newton") == ConfigErrorCode::UnknownKey);
    CHECK(code_of("Model = newton") == ConfigErrorCode::UnknownKey);
    CHECK(code_of("model newton") == ConfigErrorCode::Parse);
    CHECK(code_of("B0 = one") == ConfigErrorCode::Parse);
    CHECK(code_of("n = -3") == ConfigErrorCode::Parse);
    CHECK(code_of("B0 = 1\nB0 = 2") == ConfigErrorCode::Parse);
    CHECK(code_of("model = bohm") == ConfigErrorCode::Range);
    CHECK(code_of("tau = 0") == ConfigErrorCode::Range);
    CHECK(code_of("y_start = 2") == ConfigErrorCode::Range);
    CHECK(code_of("model = quantum\ngrid_points = 100") == ConfigErrorCode::Range);
    CHECK(code_of("model = quantum\nsigma = 0.01") == ConfigErrorCode::Range);
    // full neutron coefficients on a desk grid violate the resolution guard
    CHECK(code_of("model = quantum\nspecies = neutron\ngrid_points = 1024\nhalf_width = 4") ==
          ConfigErrorCode::Range);
    CHECK(code_of("align = yes") == ConfigErrorCode::Parse);

    try {
        parse_config("model = newton\n\nB0 = x\n");
        FAIL("no error");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("E_PARSE") != std::string::npos);
    }
}

TEST_CASE("serialize round trip", "[config]")
{
    RunConfig c = parse_config("model = event\nspecies = silver\nB0 = 1e-5\nsigma_v = 1.9845e-5\nseed = 9\n"
                               "spin_init = fixed\ntheta = 0.3\nalign = false\noutput = somewhere\n");
    const RunConfig d = parse_config(serialize(c));
    CHECK(serialize(d) == serialize(c));
    CHECK(d.field.b0 == 1e-5);
    CHECK(d.beam.sigma_v == 1.9845e-5);
    CHECK_FALSE(d.random_spin);
    CHECK_FALSE(d.align);
    CHECK(d.output == "somewhere");
}

TEST_CASE("records csv format", "[io]")
{
    const std::vector<ExitRecord> r{{0.1, -3.5, {0.5, 0.0, -1e-20}, 7}};
    const std::string s = records_csv(r);
    CHECK(s == "particle_id,vx,vz,sx,sy,sz\n7,0.10000000000000001,-3.5,0.5,0,-9.9999999999999995e-21\n");
}

TEST_CASE("histogram csv and heatmap", "[io]")
{
    HistogramGrid h = HistogramGrid::symmetric(3, 1.5);
    h.at(0, 0) = 1.0;
    h.at(2, 2) = 0.5;
    CHECK(histogram_csv(h) == "# axis=v_star bins=3 range=1.5\n1,0,0\n0,0,0\n0,0,0.5\n");
    CHECK(heatmap_pgm(h) == "P2\n3 3\n65535\n0 0 32768\n0 0 0\n65535 0 0\n");
}

TEST_CASE("run writes deterministic artifacts", "[runner]")
{
    const fs::path dir = scratch("run");
    RunConfig c = parse_config("model = newton\nn = 300\ntau = 1e-7\nseed = 3\nthreads = 1\n");
    c.output = (dir / "a").string();
    const RunSummary s = run(c, "test");
    for (const char* f : {"records.csv", "histogram.csv", "heatmap.pgm", "manifest.txt"})
        CHECK(fs::exists(dir / "a" / f));
    CHECK(s.records == 300);
    CHECK(line_count(read_file(dir / "a" / "records.csv")) == 301);
    CHECK(s.shape == Shape::Stripe);

    // re-running from the manifest, at another thread count, reproduces the records byte for byte
    RunConfig again = parse_config(read_file(dir / "a" / "manifest.txt"));
    again.output = (dir / "b").string();
    again.threads = 3;
    run(again, "test");
    CHECK(read_file(dir / "a" / "records.csv") == read_file(dir / "b" / "records.csv"));
    fs::remove_all(dir);
}

TEST_CASE("quantum run", "[runner]")
{
    const fs::path dir = scratch("quantum");
    RunConfig c = parse_config("model = quantum\nspecies = silver\nB0 = 0.1\ngrid_points = 64\nhalf_width = 2\n"
                               "sigma = 0.2\nt = 0.2\ntheta = 1.5707963267948966\n");
    c.output = dir.string();
    const RunSummary s = run(c, "test");
    REQUIRE(s.quantum);
    CHECK(std::abs(s.quantum->norm - 1.0) < 1e-12);
    CHECK(s.sides.negative == Catch::Approx(0.5).margin(0.01));
    CHECK(s.terms > 0);
    CHECK_FALSE(fs::exists(dir / "records.csv"));
    CHECK(read_file(dir / "histogram.csv").rfind("# axis=v_star bins=201 range=1.5\n", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("sweep records every requested value", "[runner]")
{
    const fs::path dir = scratch("sweep");
    RunConfig c = parse_config("model = newton\nn = 100\ntau = 1e-7\nseed = 1\n");
    c.output = dir.string();
    const auto rows = sweep_b0(c, {1.0, -2.0, 1e-5}, "test");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].ok);
    CHECK_FALSE(rows[1].ok);
    CHECK(rows[1].message.find("E_RANGE") != std::string::npos);
    CHECK(rows[2].ok);
    const std::string summary = read_file(dir / "summary.csv");
    CHECK(line_count(summary) == 4);

    // a single-element sweep is the same as a run
    RunConfig one = c;
    one.output = (dir / "single").string();
    one.field.b0 = 1.0;
    run(one, "test");
    CHECK(read_file(dir / "single" / "records.csv") == read_file(dir / "b0_1" / "records.csv"));
    fs::remove_all(dir);
}
