#ifndef ATLAS_TABLES_HPP
#define ATLAS_TABLES_HPP

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "atlas/csv.hpp"
#include "atlas/errors.hpp"
#include "atlas/selection.hpp"

namespace atlas::tables {

enum class Format { csv, markdown };

// Fixed 3-decimal output matching the paper-style tables; `.` decimal point,
// no thousands separators.
inline std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    std::string s(buf);
    if (s == "-0.000") s = "0.000";  // avoid signed-zero noise across platforms
    return s;
}

inline std::string flag_suffix(int flag) {
    return flag >= 2 ? "**" : flag == 1 ? "*" : "";
}

// Group sizes ride in the column headers, `Label (N=87)` style.
inline std::string render_table(const selection::ComparisonTable& t, Format format) {
    const bool zscore = t.statistic == selection::Statistic::zscore;
    auto header = [&](std::size_t g) {
        return t.groups[g] + " (N=" + std::to_string(t.group_sizes[g]) + ")";
    };
    std::string out;
    if (format == Format::csv) {
        out += "variable";
        for (std::size_t g = 0; g < t.groups.size(); ++g) {
            out += "," + csv::escape(header(g));
            if (zscore) out += "," + csv::escape(t.groups[g] + "_flag");
        }
        out += "\n";
        for (std::size_t v = 0; v < t.variables.size(); ++v) {
            out += csv::escape(t.variables[v]);
            for (std::size_t g = 0; g < t.groups.size(); ++g) {
                const auto& c = t.cells[v][g];
                out += ",";
                out += c.available ? format_value(c.value) : "NA";
                if (zscore) out += "," + flag_suffix(c.flag);
            }
            out += "\n";
        }
    } else {
        out += "| variable |";
        for (std::size_t g = 0; g < t.groups.size(); ++g) out += " " + header(g) + " |";
        out += "\n|---|";
        for (std::size_t g = 0; g < t.groups.size(); ++g) out += "---|";
        out += "\n";
        for (std::size_t v = 0; v < t.variables.size(); ++v) {
            out += "| " + t.variables[v] + " |";
            for (std::size_t g = 0; g < t.groups.size(); ++g) {
                const auto& c = t.cells[v][g];
                out += " ";
                out += c.available ? format_value(c.value) + (zscore ? flag_suffix(c.flag) : "")
                                   : "NA";
                out += " |";
            }
            out += "\n";
        }
        if (zscore)
            out += "\n\\* = exceeds 1 standard deviation; \\*\\* = exceeds 2 standard deviations.\n";
    }
    return out;
}

inline void write_table(const selection::ComparisonTable& t, Format format,
                        const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write table to " + path);
    out << render_table(t, format);
    if (!out) throw data_error("write failed for " + path);
}

inline void write_higher_lower(const std::vector<selection::HigherLowerRow>& rows,
                               const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write table to " + path);
    out << "variable,label,starred\n";
    for (const auto& r : rows)
        out << csv::escape(r.variable) << "," << r.label << "," << (r.starred ? "1" : "0")
            << "\n";
    if (!out) throw data_error("write failed for " + path);
}

} // namespace atlas::tables

#endif // ATLAS_TABLES_HPP
