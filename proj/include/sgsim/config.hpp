#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "sgsim/ensemble.hpp"
#include "sgsim/error.hpp"
#include "sgsim/params.hpp"
#include "sgsim/pauli.hpp"

namespace sgsim {

enum class Model
{
    Newton,
    Event,
    Quantum,
};

inline std::string_view to_string(Model m)
{
    switch (m) {
    case Model::Newton:
        return "newton";
    case Model::Event:
        return "event";
    default:
        return "quantum";
    }
}

enum class ConfigErrorCode
{
    Parse,
    UnknownKey,
    Range,
};

inline std::string_view to_string(ConfigErrorCode c)
{
    switch (c) {
    case ConfigErrorCode::Parse:
        return "E_PARSE";
    case ConfigErrorCode::UnknownKey:
        return "E_UNKNOWN_KEY";
    default:
        return "E_RANGE";
    }
}

class ConfigError : public std::runtime_error
{
  public:
    ConfigError(ConfigErrorCode code, const std::string& msg, std::size_t line = 0)
        : std::runtime_error(std::string(to_string(code)) + (line ? " (line " + std::to_string(line) + ")" : "") +
                             ": " + msg),
          code_(code), line_(line)
    {
    }
    ConfigErrorCode code() const { return code_; }
    std::size_t line() const { return line_; }

  private:
    ConfigErrorCode code_;
    std::size_t line_;
};

struct RunConfig
{
    Model model{Model::Newton};
    Species species{Species::Neutron};
    FieldConfig field;
    BeamConfig beam{preset(Species::Neutron).beam};

    // classical and event ensembles
    std::size_t n{10000};
    double tau{1e-8}; ///< s
    std::uint64_t seed{0};
    unsigned threads{0};
    bool random_spin{true};
    bool align{true}; ///< event model only

    // spin direction for fixed-spin ensembles and the quantum initial state
    double theta{0.0};
    double alpha{0.0};

    // quantum
    GridSpec grid{256, 2.0};
    double t{1.0};        ///< in units of t0
    double sigma{0.1};    ///< initial width in units of v0
    double reduction{1.0}; ///< t0 = t*/reduction, v0 = v*/reduction
    bool sigma_x_term{true};

    // analysis
    std::size_t bins{201};
    double range{1.5};

    std::string output{"out"};
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view v, std::size_t line, std::string_view key)
{
    double x = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(x))
        throw ConfigError(ConfigErrorCode::Parse, "'" + std::string(key) + "' expects a number, got '" +
                                                      std::string(v) + "'", line);
    return x;
}

inline std::uint64_t parse_uint(std::string_view v, std::size_t line, std::string_view key)
{
    std::uint64_t x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw ConfigError(ConfigErrorCode::Parse, "'" + std::string(key) + "' expects a non-negative integer, got '" +
                                                      std::string(v) + "'", line);
    return x;
}

inline bool parse_bool(std::string_view v, std::size_t line, std::string_view key)
{
    if (v == "true")
        return true;
    if (v == "false")
        return false;
    throw ConfigError(ConfigErrorCode::Parse,
                      "'" + std::string(key) + "' expects true or false, got '" + std::string(v) + "'", line);
}

inline std::string format_double(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

} // namespace detail

/// Engine preconditions for the whole run, checked before any compute.
inline void validate(const RunConfig& c)
{
    auto range = [](const std::string& rule) { throw ConfigError(ConfigErrorCode::Range, rule); };
    try {
        c.field.validate();
        c.beam.validate();
        const PhysicalParams p = preset(c.species).params;
        if (c.field.y_start < 0.0)
            range("newtonian-engine: y_start must be >= 0 (particles start at y = 0)");
        if (c.bins < 2)
            range("analysis: bins must be >= 2");
        if (!(c.range > 0.0))
            range("analysis: range must be > 0");
        if (c.output.empty())
            range("cli-runner: output must not be empty");
        if (c.model == Model::Quantum) {
            c.grid.validate();
            if (!(c.t >= 0.0))
                range("pauli-solver: t must be >= 0");
            if (!(c.reduction >= 1.0))
                range("pauli-solver: reduction must be >= 1");
            if (!(c.sigma > 0.0) || c.sigma < 3.0 * c.grid.delta())
                range("pauli-solver: sigma must be > 0 and at least 3 grid spacings (" +
                      detail::format_double(3.0 * c.grid.delta()) + ")");
            const Scales s = derive_scales(p, c.field, c.beam);
            const DimensionlessCoeffs k =
                dimensionless_coeffs(p, c.field, s.t_star / c.reduction, s.v_star / c.reduction);
            const GridCheck g = check_grid(c.grid, k);
            if (g.verdict == GridVerdict::Reject)
                range("pauli-solver: grid too coarse, 2 a delta = " + detail::format_double(g.two_a_delta) +
                      " must be < 2");
        } else {
            if (c.n < 1)
                range("newtonian-engine: n must be >= 1");
            if (!(c.tau > 0.0))
                range("newtonian-engine: tau must be > 0");
            detail::make_schedule(c.field, c.beam, c.tau);
        }
    } catch (const RangeError& e) {
        throw ConfigError(ConfigErrorCode::Range, e.what());
    } catch (const EngineError& e) {
        throw ConfigError(ConfigErrorCode::Range, e.what());
    }
}

/// Parses flat `key = value` lines with '#' comments. Keys are case sensitive; unknown keys are errors.
/// Species presets fill v_y first, so an explicit v_y wins regardless of line order.
inline RunConfig parse_config(std::string_view text)
{
    std::map<std::string, std::pair<std::string, std::size_t>, std::less<>> kv;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(ConfigErrorCode::Parse, "expected 'key = value', got '" + std::string(line) + "'",
                              line_no);
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (key.empty() || value.empty())
            throw ConfigError(ConfigErrorCode::Parse, "empty key or value", line_no);
        if (!kv.emplace(key, std::pair{value, line_no}).second)
            throw ConfigError(ConfigErrorCode::Parse, "duplicate key '" + key + "'", line_no);
    }

    static const std::set<std::string, std::less<>> known{
        "model", "species", "B0",     "B1",    "y_start",   "y_end",        "v_y",  "sigma_x", "sigma_v",
        "n",     "tau",     "seed",   "threads", "spin_init", "theta",      "alpha", "align",  "grid_points",
        "half_width", "t",  "sigma",  "reduction", "sigma_x_term", "bins", "range", "output"};
    for (const auto& [key, v] : kv)
        if (!known.contains(key))
            throw ConfigError(ConfigErrorCode::UnknownKey, "unknown key '" + key + "'", v.second);

    RunConfig c;
    auto get = [&](std::string_view key) -> const std::pair<std::string, std::size_t>* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    auto num = [&](std::string_view key, double& out) {
        if (const auto* v = get(key))
            out = detail::parse_double(v->first, v->second, key);
    };
    auto uint = [&](std::string_view key, auto& out) {
        if (const auto* v = get(key)) {
            const std::uint64_t x = detail::parse_uint(v->first, v->second, key);
            using T = std::remove_reference_t<decltype(out)>;
            if (x > std::numeric_limits<T>::max())
                throw ConfigError(ConfigErrorCode::Range, "'" + std::string(key) + "' is too large", v->second);
            out = static_cast<T>(x);
        }
    };
    auto flag = [&](std::string_view key, bool& out) {
        if (const auto* v = get(key))
            out = detail::parse_bool(v->first, v->second, key);
    };

    if (const auto* v = get("model")) {
        if (v->first == "newton")
            c.model = Model::Newton;
        else if (v->first == "event")
            c.model = Model::Event;
        else if (v->first == "quantum")
            c.model = Model::Quantum;
        else
            throw ConfigError(ConfigErrorCode::Range, "model must be newton, event or quantum", v->second);
    }
    if (const auto* v = get("species")) {
        const auto s = species_from_string(v->first);
        if (!s)
            throw ConfigError(ConfigErrorCode::Range, "species must be neutron or silver", v->second);
        c.species = *s;
    }
    c.beam = preset(c.species).beam;

    num("B0", c.field.b0);
    num("B1", c.field.b1);
    num("y_start", c.field.y_start);
    num("y_end", c.field.y_end);
    num("v_y", c.beam.v_y);
    num("sigma_x", c.beam.sigma_x);
    num("sigma_v", c.beam.sigma_v);
    uint("n", c.n);
    num("tau", c.tau);
    uint("seed", c.seed);
    uint("threads", c.threads);
    if (const auto* v = get("spin_init")) {
        if (v->first == "random")
            c.random_spin = true;
        else if (v->first == "fixed")
            c.random_spin = false;
        else
            throw ConfigError(ConfigErrorCode::Range, "spin_init must be random or fixed", v->second);
    }
    num("theta", c.theta);
    num("alpha", c.alpha);
    flag("align", c.align);
    uint("grid_points", c.grid.points);
    num("half_width", c.grid.half_width);
    num("t", c.t);
    num("sigma", c.sigma);
    num("reduction", c.reduction);
    flag("sigma_x_term", c.sigma_x_term);
    uint("bins", c.bins);
    num("range", c.range);
    if (const auto* v = get("output"))
        c.output = v->first;

    validate(c);
    return c;
}

/// The config as parseable text, every key written out.
inline std::string serialize(const RunConfig& c)
{
    std::ostringstream o;
    auto d = [](double v) { return detail::format_double(v); };
    o << "model = " << to_string(c.model) << '\n';
    o << "species = " << to_string(c.species) << '\n';
    o << "B0 = " << d(c.field.b0) << '\n';
    o << "B1 = " << d(c.field.b1) << '\n';
    o << "y_start = " << d(c.field.y_start) << '\n';
    o << "y_end = " << d(c.field.y_end) << '\n';
    o << "v_y = " << d(c.beam.v_y) << '\n';
    o << "sigma_x = " << d(c.beam.sigma_x) << '\n';
    o << "sigma_v = " << d(c.beam.sigma_v) << '\n';
    o << "n = " << c.n << '\n';
    o << "tau = " << d(c.tau) << '\n';
    o << "seed = " << c.seed << '\n';
    o << "threads = " << c.threads << '\n';
    o << "spin_init = " << (c.random_spin ? "random" : "fixed") << '\n';
    o << "theta = " << d(c.theta) << '\n';
    o << "alpha = " << d(c.alpha) << '\n';
    o << "align = " << (c.align ? "true" : "false") << '\n';
    o << "grid_points = " << c.grid.points << '\n';
    o << "half_width = " << d(c.grid.half_width) << '\n';
    o << "t = " << d(c.t) << '\n';
    o << "sigma = " << d(c.sigma) << '\n';
    o << "reduction = " << d(c.reduction) << '\n';
    o << "sigma_x_term = " << (c.sigma_x_term ? "true" : "false") << '\n';
    o << "bins = " << c.bins << '\n';
    o << "range = " << d(c.range) << '\n';
    o << "output = " << c.output << '\n';
    return o.str();
}

} // namespace sgsim
