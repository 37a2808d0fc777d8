#pragma once

// Tabular command output. CSV carries one "# key=value,..." metadata line,
// a header row and numeric rows at 17 significant digits; JSON carries the
// same three parts. Both forms parse back to the same Table.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace levyrisk::cli {

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw std::invalid_argument("not a number: \"" + s + "\"");
    return v;
}

struct Table {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_meta(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }
    void add_meta(std::string key, double value) { meta.emplace_back(std::move(key), format_double(value)); }
    void add_meta(std::string key, long long value) { meta.emplace_back(std::move(key), std::to_string(value)); }

    friend bool operator==(const Table& a, const Table& b) {
        if (a.meta != b.meta || a.columns != b.columns || a.rows.size() != b.rows.size()) return false;
        for (std::size_t i = 0; i < a.rows.size(); ++i) {
            if (a.rows[i].size() != b.rows[i].size()) return false;
            for (std::size_t k = 0; k < a.rows[i].size(); ++k) {
                const double x = a.rows[i][k], y = b.rows[i][k];
                if (!(x == y || (std::isnan(x) && std::isnan(y)))) return false;
            }
        }
        return true;
    }
};

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

}  // namespace detail

inline std::string to_csv(const Table& t) {
    std::string out = "#";
    for (std::size_t i = 0; i < t.meta.size(); ++i) {
        out += (i ? "," : " ");
        out += t.meta[i].first + "=" + t.meta[i].second;
    }
    out += "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
        out += "\n";
    }
    return out;
}

inline Table from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Table t;
    if (!std::getline(in, line) || line.rfind("#", 0) != 0) throw std::invalid_argument("csv: missing metadata line");
    const std::string meta = line.size() > 2 ? line.substr(2) : "";
    if (!meta.empty()) {
        for (const auto& kv : detail::split(meta, ',')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("csv: bad metadata entry \"" + kv + "\"");
            t.meta.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
        }
    }
    if (!std::getline(in, line)) throw std::invalid_argument("csv: missing header row");
    t.columns = detail::split(line, ',');
    while (std::getline(in, line)) {
        std::vector<double> row;
        for (const auto& cell : detail::split(line, ',')) row.push_back(parse_double(cell));
        if (row.size() != t.columns.size()) throw std::invalid_argument("csv: row width differs from header");
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline std::string to_json(const Table& t) {
    nlohmann::ordered_json j;
    j["meta"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.meta) j["meta"][k] = v;
    j["columns"] = t.columns;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (double v : row) {
            if (std::isfinite(v)) {
                r.push_back(v);
            } else {
                r.push_back(nullptr);
            }
        }
        j["rows"].push_back(r);
    }
    return j.dump(2) + "\n";
}

inline Table from_json(const std::string& text) {
    const auto j = nlohmann::ordered_json::parse(text);
    Table t;
    for (const auto& [k, v] : j.at("meta").items()) t.meta.emplace_back(k, v.get<std::string>());
    t.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& r : j.at("rows")) {
        std::vector<double> row;
        for (const auto& v : r) row.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace levyrisk::cli
