#pragma once

/**
 * @file csv_io.hpp
 * @brief Snapshot ("x,c") and trajectory CSV files.
 *
 * Numbers are written with 17 significant digits so a snapshot round-trips
 * bit for bit. Formatting goes through snprintf, so identical inputs give
 * byte-identical files.
 */

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarity/diagnostics.hpp"
#include "polarity/grid.hpp"

namespace polarity {

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline constexpr const char* kTrajectoryHeader =
    "t,mass,J,Jshift,alpha,c_left,c_right,entropy,fisher,lyapunov,dissipation,supnorm";
inline constexpr const char* kExchangeColumns = "mu_left,mu_right,total_mass";

inline std::string snapshot_csv(const Field& f) {
    std::string out = "x,c\n";
    const auto x = f.grid().nodes();
    for (std::size_t i = 0; i < f.size(); ++i) {
        out += format_double(x[i]);
        out += ',';
        out += format_double(f[i]);
        out += '\n';
    }
    return out;
}

inline std::string trajectory_csv(const std::vector<DiagnosticsRecord>& records, bool exchange_columns) {
    std::string out = kTrajectoryHeader;
    if (exchange_columns) {
        out += ',';
        out += kExchangeColumns;
    }
    out += '\n';
    for (const auto& r : records) {
        const double row[] = {r.t,       r.mass,    r.J,      r.J_shift,  r.alpha,       r.c_left,
                              r.c_right, r.entropy, r.fisher, r.lyapunov, r.dissipation, r.sup_norm};
        for (std::size_t k = 0; k < std::size(row); ++k) {
            if (k) out += ',';
            out += format_double(row[k]);
        }
        if (exchange_columns) {
            for (double v : {r.mu_left, r.mu_right, r.total_mass}) {
                out += ',';
                out += format_double(v);
            }
        }
        out += '\n';
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os << content;
    if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

struct SnapshotData {
    std::vector<double> x;
    std::vector<double> c;
};

/// Parses an "x,c" snapshot. Throws std::runtime_error with the offending line number.
inline SnapshotData parse_snapshot_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    SnapshotData out;
    bool header_seen = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != "x,c") throw std::runtime_error("snapshot line 1: expected header 'x,c'");
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error("snapshot line " + std::to_string(lineno) + ": expected two columns");
        }
        try {
            std::size_t used = 0;
            const std::string xs = line.substr(0, comma);
            const std::string cs = line.substr(comma + 1);
            const double x = std::stod(xs, &used);
            if (used != xs.size()) throw std::invalid_argument("x");
            const double c = std::stod(cs, &used);
            if (used != cs.size()) throw std::invalid_argument("c");
            out.x.push_back(x);
            out.c.push_back(c);
        } catch (const std::exception&) {
            throw std::runtime_error("snapshot line " + std::to_string(lineno) + ": malformed number");
        }
    }
    if (!header_seen) throw std::runtime_error("snapshot: empty file");
    if (out.x.size() < 2) throw std::runtime_error("snapshot: need at least two rows");
    for (std::size_t i = 1; i < out.x.size(); ++i) {
        if (!(out.x[i] > out.x[i - 1])) throw std::runtime_error("snapshot: x must be strictly increasing");
    }
    return out;
}

/// Loads a snapshot onto `grid`, interpolating linearly when the node sets differ.
inline Field field_from_snapshot(const SnapshotData& data, GridPtr grid) {
    if (data.x.size() == grid->size()) return Field(std::move(grid), data.c);
    const auto& xs = data.x;
    const auto& cs = data.c;
    return Field::sample(std::move(grid), [&](double x) {
        if (x <= xs.front()) return cs.front();
        if (x >= xs.back()) return cs.back();
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t j = static_cast<std::size_t>(it - xs.begin());
        const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
        return (1.0 - t) * cs[j - 1] + t * cs[j];
    });
}

}  // namespace polarity
