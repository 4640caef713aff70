#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>

#include <unistd.h>

#include "sgsim/error.hpp"
#include "sgsim/histogram.hpp"
#include "sgsim/newton.hpp"

namespace sgsim {

/// 17 significant digits, locale independent.
inline void append_g17(std::string& out, double v)
{
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    out.append(buf, r.ptr);
}

inline std::string records_csv(std::span<const ExitRecord> records)
{
    std::string s = "particle_id,vx,vz,sx,sy,sz\n";
    s.reserve(s.size() + records.size() * 120);
    for (const ExitRecord& r : records) {
        s += std::to_string(r.particle_id);
        for (double v : {r.vx, r.vz, r.spin.x, r.spin.y, r.spin.z}) {
            s += ',';
            append_g17(s, v);
        }
        s += '\n';
    }
    return s;
}

/// Comment header then one line per vz bin (lowest first), vx increasing along the line.
inline std::string histogram_csv(const HistogramGrid& h)
{
    std::string s = "# axis=" + h.unit + " bins=" + std::to_string(h.nx) + " range=";
    append_g17(s, h.x_hi);
    s += '\n';
    for (std::size_t iz = 0; iz < h.nz; ++iz) {
        for (std::size_t ix = 0; ix < h.nx; ++ix) {
            if (ix)
                s += ',';
            append_g17(s, h.at(ix, iz));
        }
        s += '\n';
    }
    return s;
}

/// Plain 16-bit graymap, linear in the bin value with the maximum at 65535. The top row is the highest vz bin.
inline std::string heatmap_pgm(const HistogramGrid& h)
{
    const double peak = h.values.empty() ? 0.0 : *std::max_element(h.values.begin(), h.values.end());
    std::string s = "P2\n" + std::to_string(h.nx) + " " + std::to_string(h.nz) + "\n65535\n";
    for (std::size_t row = 0; row < h.nz; ++row) {
        const std::size_t iz = h.nz - 1 - row;
        for (std::size_t ix = 0; ix < h.nx; ++ix) {
            const double v = peak > 0.0 ? h.at(ix, iz) / peak : 0.0;
            const auto level = static_cast<long>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
            if (ix)
                s += ' ';
            s += std::to_string(level);
        }
        s += '\n';
    }
    return s;
}

/// Writes to a temporary file in the target directory, then renames it over the destination.
inline void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    const std::filesystem::path tmp =
        path.string() + ".tmp." + std::to_string(static_cast<long>(::getpid()));
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw EngineError("cannot open " + tmp.string() + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f)
            throw EngineError("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw EngineError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

} // namespace sgsim
