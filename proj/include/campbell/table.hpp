#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "error.hpp"

namespace campbell {

using Cell = std::variant<double, long long, std::string, bool>;

// Rectangular result table shared by the CSV and JSON writers.
struct Table {
    std::string command;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw invalid_argument("table row width does not match the header");
        rows.push_back(std::move(row));
    }
};

// Shortest round-trip representation; nan, inf and -inf spelled out, zero without sign.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string csv_field(const Cell& c) {
    struct V {
        std::string operator()(double v) const { return format_number(v); }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string q = "\"";
            for (char ch : s) {
                if (ch == '"') q += '"';
                q += ch;
            }
            return q + '"';
        }
    };
    return std::visit(V{}, c);
}

inline void write_csv(std::ostream& out, const Table& t) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
        out << '\n';
    }
}

// {"command": ..., "columns": [...], "rows": [[...], ...]}; non-finite numbers become null.
inline nlohmann::json table_to_json(const Table& t) {
    nlohmann::json j;
    j["command"] = t.command;
    j["columns"] = t.columns;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& c : row) {
            if (const double* d = std::get_if<double>(&c)) {
                if (std::isfinite(*d))
                    r.push_back(*d == 0.0 ? 0.0 : *d);
                else
                    r.push_back(nullptr);
            } else if (const long long* i = std::get_if<long long>(&c)) {
                r.push_back(*i);
            } else if (const bool* b = std::get_if<bool>(&c)) {
                r.push_back(*b);
            } else {
                r.push_back(std::get<std::string>(c));
            }
        }
        j["rows"].push_back(std::move(r));
    }
    return j;
}

inline void write_json(std::ostream& out, const Table& t) { out << table_to_json(t).dump(1) << '\n'; }

}  // namespace campbell
