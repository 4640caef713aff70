#include "CLI11.hpp"

#include "sgsim/config.hpp"
#include "sgsim/io.hpp"
#include "sgsim/runner.hpp"
#include "sgsim/verify.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

#ifndef SGSIM_VERSION
#define SGSIM_VERSION "dev"
#endif

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kEngineError = 3;
constexpr int kVerifyFailed = 4;

sgsim::RunConfig load(const std::string& path, const std::string& output, unsigned threads)
{
    std::string text;
    try {
        text = sgsim::read_file(path);
    } catch (const std::exception& e) {
        throw sgsim::ConfigError(sgsim::ConfigErrorCode::Parse, e.what());
    }
    sgsim::RunConfig c = sgsim::parse_config(text);
    if (!output.empty())
        c.output = output;
    if (threads)
        c.threads = threads;
    return c;
}

void print_summary(const sgsim::RunSummary& s)
{
    std::printf("%s: shape=%s side_negative=%.6f side_positive=%.6f radial_peak=%.3f wall=%.2fs\n",
                s.directory.string().c_str(), sgsim::to_string(s.shape).c_str(), s.sides.negative, s.sides.positive,
                s.metrics.radial_peak, s.wall_seconds);
    for (const auto& w : s.warnings)
        std::fprintf(stderr, "warning: %s\n", w.c_str());
}

std::vector<double> parse_b0_list(const std::string& list)
{
    std::vector<double> values;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto t = sgsim::detail::trim(item);
        values.push_back(sgsim::detail::parse_double(t, 0, "--b0"));
    }
    if (values.empty())
        throw sgsim::ConfigError(sgsim::ConfigErrorCode::Parse, "--b0 needs at least one value");
    return values;
}

int presets()
{
    std::printf("%-8s %10s %12s %8s %12s %12s %12s %12s %6s %14s\n", "species", "mass/kg", "gamma/(Ts)^-1", "v_y",
                "t*/s", "v*/(m/s)", "z*/m", "a", "b", "c/B0");
    for (auto sp : {sgsim::Species::Neutron, sgsim::Species::ImaginarySilver}) {
        const sgsim::Preset p = sgsim::preset(sp);
        const sgsim::FieldConfig f;
        const sgsim::Scales s = sgsim::derive_scales(p.params, f, p.beam);
        const sgsim::DimensionlessCoeffs k = sgsim::dimensionless_coeffs(p.params, f, s.t_star, s.v_star);
        std::printf("%-8s %10.3e %12.5e %8.1f %12.5e %12.5e %12.5e %12.6g %6g %14.6g\n",
                    std::string(sgsim::to_string(sp)).c_str(), p.params.mass, p.params.gamma, p.beam.v_y, s.t_star,
                    s.v_star, s.z_star, k.a, k.b, k.c / f.b0);
    }
    std::printf("field defaults: B0 = 1 T, B1 = 300 T/m, region y in [1, 1.8) m\n");
    return kOk;
}

int verify()
{
    bool all = true;
    for (const auto& c : sgsim::verify_suite()) {
        std::printf("%s  %s (%s)\n", c.ok ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        all = all && c.ok;
    }
    return all ? kOk : kVerifyFailed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stern-Gerlach simulation suite: Newtonian, event-by-event and Pauli-equation models"};
    app.set_version_flag("--version", SGSIM_VERSION);
    app.require_subcommand(1);

    std::string config_path, output, b0_list;
    unsigned threads = 0;

    auto* run = app.add_subcommand("run", "run one config and write its artifacts");
    run->add_option("config", config_path, "config file (key = value lines)")->required();
    run->add_option("-o,--output", output, "output directory (overrides the config)");
    run->add_option("-j,--threads", threads, "worker threads (overrides the config)");

    auto* sweep = app.add_subcommand("sweep", "run a config for several B0 values");
    sweep->add_option("config", config_path, "base config file")->required();
    sweep->add_option("--b0", b0_list, "comma-separated B0 values in T")->required();
    sweep->add_option("-o,--output", output, "output directory (overrides the config)");
    sweep->add_option("-j,--threads", threads, "worker threads (overrides the config)");

    auto* ver = app.add_subcommand("verify", "run the analytic-oracle suite");
    auto* pre = app.add_subcommand("presets", "print species presets and derived scales");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*pre)
            return presets();
        if (*ver)
            return verify();
        if (*run) {
            const sgsim::RunConfig c = load(config_path, output, threads);
            print_summary(sgsim::run(c, SGSIM_VERSION));
            return kOk;
        }
        if (*sweep) {
            const sgsim::RunConfig c = load(config_path, output, threads);
            const auto values = parse_b0_list(b0_list);
            bool failed = false;
            for (const auto& row : sgsim::sweep_b0(c, values, SGSIM_VERSION)) {
                if (row.ok)
                    print_summary(row.summary);
                else {
                    failed = true;
                    std::fprintf(stderr, "B0 = %g failed: %s\n", row.b0, row.message.c_str());
                }
            }
            return failed ? kEngineError : kOk;
        }
    } catch (const sgsim::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "engine error: %s\n", e.what());
        return kEngineError;
    }
    return kOk;
}
