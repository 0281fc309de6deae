#pragma once

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace sdc {

using Cell = std::variant<double, std::int64_t, std::string>;

// Column-named rows, written as CSV or as JSON with the same content.
struct Table
{
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

// 17 significant digits in scientific notation; round-trips every double.
inline std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

inline std::string format_cell(const Cell& c)
{
    if (const auto* d = std::get_if<double>(&c)) {
        return format_double(*d);
    }
    if (const auto* i = std::get_if<std::int64_t>(&c)) {
        return std::to_string(*i);
    }
    return std::get<std::string>(c);
}

inline void write_csv(std::ostream& out, const Table& t)
{
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        out << (i ? "," : "") << t.columns[i];
    }
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << format_cell(row[i]);
        }
        out << '\n';
    }
}

inline nlohmann::ordered_json cell_json(const Cell& c)
{
    if (const auto* d = std::get_if<double>(&c)) {
        if (!std::isfinite(*d)) {
            return nullptr; // JSON has no NaN/inf
        }
        return *d;
    }
    if (const auto* i = std::get_if<std::int64_t>(&c)) {
        return *i;
    }
    return std::get<std::string>(c);
}

inline nlohmann::ordered_json to_json(const Table& t)
{
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
            obj[t.columns[i]] = cell_json(row[i]);
        }
        rows.push_back(std::move(obj));
    }
    return {{"columns", t.columns}, {"rows", std::move(rows)}};
}

inline void write_json(std::ostream& out, const Table& t)
{
    out << to_json(t).dump(2) << '\n';
}

} // namespace sdc
