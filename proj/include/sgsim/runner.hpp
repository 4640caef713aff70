#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sgsim/analysis.hpp"
#include "sgsim/config.hpp"
#include "sgsim/ensemble.hpp"
#include "sgsim/io.hpp"
#include "sgsim/pauli.hpp"

namespace sgsim {

struct RunSummary
{
    Shape shape{Shape::Other};
    ShapeMetrics metrics;
    SideWeights sides;
    double wall_seconds{0.0};
    std::size_t records{0};
    std::optional<Observables> quantum;
    std::size_t terms{0};
    std::vector<std::string> warnings;
    std::filesystem::path directory;
};

inline EnsembleSpec ensemble_spec(const RunConfig& c)
{
    EnsembleSpec s;
    s.n = c.n;
    s.tau = c.tau;
    s.seed = c.seed;
    s.threads = c.threads;
    s.init.random_spin = c.random_spin;
    s.init.theta = c.theta;
    s.init.alpha = c.alpha;
    return s;
}

/// Exit records of a newton or event config.
inline std::vector<ExitRecord> simulate_records(const RunConfig& c)
{
    const PhysicalParams p = preset(c.species).params;
    if (c.model == Model::Event)
        return run_event_ensemble(ensemble_spec(c), p, c.field, c.beam, c.align);
    detail::require(c.model == Model::Newton, "simulate_records: quantum configs have no records");
    return run_ensemble(ensemble_spec(c), p, c.field, c.beam);
}

inline DimensionlessCoeffs quantum_coeffs(const RunConfig& c)
{
    const PhysicalParams p = preset(c.species).params;
    const Scales s = derive_scales(p, c.field, c.beam);
    return dimensionless_coeffs(p, c.field, s.t_star / c.reduction, s.v_star / c.reduction);
}

/// Final spinor of a quantum config.
inline SpinorGrid simulate_spinor(const RunConfig& c, PropagationReport* report = nullptr)
{
    const SpinorGrid psi0 = init_state({c.theta, c.alpha}, c.sigma, c.grid);
    PropagateOptions opt;
    opt.hamiltonian.sigma_x = c.sigma_x_term;
    return chebyshev_propagate(psi0, quantum_coeffs(c), c.t, opt, report);
}

inline std::string velocity_unit_label(const RunConfig& c)
{
    return c.model == Model::Quantum && c.reduction != 1.0 ? "v0" : "v_star";
}

/// Runs one config and writes records.csv (ensembles), histogram.csv, heatmap.pgm and manifest.txt.
inline RunSummary run(const RunConfig& c, const std::string& version)
{
    validate(c);
    const auto start = std::chrono::steady_clock::now();
    RunSummary out;
    out.directory = c.output;
    std::filesystem::create_directories(out.directory);

    HistogramGrid hist;
    if (c.model == Model::Quantum) {
        PropagationReport rep;
        const SpinorGrid psi = simulate_spinor(c, &rep);
        const HistogramGrid map = probability_map(psi, ProbabilityComponent::Total, velocity_unit_label(c));
        out.sides = side_weights(map);
        hist = rebin(map, c.bins, c.range);
        out.quantum = observables(psi);
        out.terms = rep.terms;
        out.warnings = rep.warnings;
    } else {
        const std::vector<ExitRecord> records = simulate_records(c);
        const Scales s = derive_scales(preset(c.species).params, c.field, c.beam);
        hist = histogram2d(records, c.bins, c.range, s.v_star);
        out.sides = side_weights(records);
        out.records = records.size();
        write_atomic(out.directory / "records.csv", records_csv(records));
    }
    const ShapeResult shape = classify_shape(hist);
    out.shape = shape.shape;
    out.metrics = shape.metrics;
    write_atomic(out.directory / "histogram.csv", histogram_csv(hist));
    write_atomic(out.directory / "heatmap.pgm", heatmap_pgm(hist));

    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string m = "# sgsim " + version + "\n";
    auto kv = [&](const std::string& k, double v) {
        m += "# " + k + " = ";
        append_g17(m, v);
        m += '\n';
    };
    m += "# seed = " + std::to_string(c.seed) + "\n";
    kv("wall_seconds", out.wall_seconds);
    m += "# shape = " + to_string(out.shape) + "\n";
    kv("side_negative", out.sides.negative);
    kv("side_positive", out.sides.positive);
    kv("radial_peak", out.metrics.radial_peak);
    kv("pole_fraction", out.metrics.pole_fraction);
    kv("angular_spread_deg", out.metrics.angular_spread_deg);
    kv("vz_bimodality", out.metrics.vz_bimodality);
    kv("vx_width", out.metrics.vx_width);
    kv("vz_spread", out.metrics.vz_spread);
    if (out.quantum) {
        kv("norm", out.quantum->norm);
        kv("weight_up", out.quantum->weight_up);
        kv("weight_down", out.quantum->weight_down);
        kv("mean_z_up", out.quantum->mean_z_up);
        kv("mean_z_down", out.quantum->mean_z_down);
        m += "# chebyshev_terms = " + std::to_string(out.terms) + "\n";
    }
    for (const std::string& w : out.warnings)
        m += "# warning: " + w + "\n";
    m += serialize(c);
    write_atomic(out.directory / "manifest.txt", m);
    return out;
}

struct SweepRow
{
    double b0{0.0};
    bool ok{false};
    RunSummary summary;
    std::string message;
};

namespace detail {
inline std::string csv_quote(const std::string& s)
{
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"')
            q += '"';
        q += ch == '\n' ? ' ' : ch;
    }
    return q + '"';
}
} // namespace detail

/// One run per B0 in subdirectories b0_<value>, plus summary.csv. Failed runs are recorded and skipped.
inline std::vector<SweepRow> sweep_b0(const RunConfig& base, const std::vector<double>& values,
                                      const std::string& version)
{
    detail::require(!values.empty(), "sweep: no B0 values");
    std::filesystem::create_directories(base.output);
    std::vector<SweepRow> rows;
    for (double b0 : values) {
        SweepRow row;
        row.b0 = b0;
        RunConfig c = base;
        c.field.b0 = b0;
        c.output = (std::filesystem::path(base.output) / ("b0_" + detail::format_double(b0))).string();
        try {
            row.summary = run(c, version);
            row.ok = true;
        } catch (const std::exception& e) {
            row.message = e.what();
        }
        rows.push_back(std::move(row));
    }

    std::string s = "B0,status,shape,side_negative,side_positive,radial_peak,message\n";
    for (const SweepRow& r : rows) {
        s += detail::format_double(r.b0);
        s += r.ok ? ",ok," : ",error,";
        s += r.ok ? to_string(r.summary.shape) : "";
        for (double v : {r.summary.sides.negative, r.summary.sides.positive, r.summary.metrics.radial_peak}) {
            s += ',';
            if (r.ok)
                append_g17(s, v);
        }
        s += ',' + (r.message.empty() ? std::string() : detail::csv_quote(r.message)) + '\n';
    }
    write_atomic(std::filesystem::path(base.output) / "summary.csv", s);
    return rows;
}

} // namespace sgsim
