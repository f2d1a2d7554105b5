#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sslr {

/// A named table of float columns plus the provenance block that makes a CSV
/// reproducible: seed, config hash, tool version, and a timestamp.
struct ResultTable {
    std::string name;
    std::vector<std::string> columns; ///< header cells, name_unit style
    std::vector<std::vector<double>> rows;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string tool_version;
    std::string timestamp;

    void add_row(std::vector<double> row) {
        if (row.size() != columns.size())
            throw std::invalid_argument("ResultTable: row width does not match header");
        rows.push_back(std::move(row));
    }
};

namespace detail {

inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace detail

/// Serializes the table: '#'-prefixed metadata lines, then the header, then
/// one line per row with 9-significant-digit values and LF endings.
inline std::string to_csv(const ResultTable& t) {
    std::string out;
    out += "# tool_version: " + t.tool_version + "\n";
    out += "# seed: " + std::to_string(t.seed) + "\n";
    out += "# config_hash: " + t.config_hash + "\n";
    out += "# timestamp: " + t.timestamp + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i)
                out += ",";
            out += detail::format_value(row[i]);
        }
        out += "\n";
    }
    return out;
}

/// Writes atomically: the content lands in a sibling temp file first and is
/// renamed over the target, so readers never observe a half-written table.
inline void write_csv(const ResultTable& t, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw std::runtime_error("write_csv: cannot open '" + tmp + "'");
        out << to_csv(t);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("write_csv: cannot rename onto '" + path + "'");
}

/// Reads a table back; the inverse of to_csv for round-trip checks.
inline ResultTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("read_csv: cannot open '" + path + "'");
    ResultTable t;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const auto colon = line.find(": ");
            if (colon == std::string::npos)
                continue;
            const std::string key = line.substr(2, colon - 2);
            const std::string val = line.substr(colon + 2);
            if (key == "tool_version")
                t.tool_version = val;
            else if (key == "seed")
                t.seed = std::stoull(val);
            else if (key == "config_hash")
                t.config_hash = val;
            else if (key == "timestamp")
                t.timestamp = val;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        if (!header_seen) {
            while (std::getline(ss, cell, ','))
                t.columns.push_back(cell);
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, cell, ','))
            row.push_back(std::stod(cell));
        t.add_row(std::move(row));
    }
    return t;
}

/// The CSV text with the timestamp line removed, for determinism comparisons.
inline std::string csv_payload(const std::string& csv_text) {
    std::string out;
    std::stringstream ss(csv_text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.rfind("# timestamp:", 0) == 0)
            continue;
        out += line;
        out += "\n";
    }
    return out;
}

} // namespace sslr
