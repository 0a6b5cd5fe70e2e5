#ifndef KGHEUN_TABLE_HPP
#define KGHEUN_TABLE_HPP

// Column-oriented result tables with CSV and JSON writers. Floating point
// cells are written with 12 significant digits so regenerated files diff
// cleanly; missing cells become empty CSV fields or JSON null.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace kgheun {

using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Table
{
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

enum class OutputFormat { csv, json };

inline std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string format_cell(Cell const& c)
{
    return std::visit(
        [](auto const& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>)
                return {};
            else if constexpr (std::is_same_v<T, std::int64_t>)
                return std::to_string(v);
            else if constexpr (std::is_same_v<T, double>)
                return format_double(v);
            else
                return v;
        },
        c);
}

inline void write_csv(std::ostream& os, Table const& t)
{
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (auto const& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << format_cell(row[i]);
        os << '\n';
    }
}

inline nlohmann::ordered_json to_json(Table const& t)
{
    auto arr = nlohmann::ordered_json::array();
    for (auto const& row : t.rows) {
        nlohmann::ordered_json rec = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < t.columns.size() && i < row.size(); ++i) {
            auto const& c = row[i];
            if (std::holds_alternative<std::monostate>(c))
                rec[t.columns[i]] = nullptr;
            else if (auto const* iv = std::get_if<std::int64_t>(&c))
                rec[t.columns[i]] = *iv;
            else if (auto const* dv = std::get_if<double>(&c))
                rec[t.columns[i]] = std::stod(format_double(*dv)); // round to 12 digits
            else
                rec[t.columns[i]] = std::get<std::string>(c);
        }
        arr.push_back(std::move(rec));
    }
    return arr;
}

inline void write_json(std::ostream& os, Table const& t)
{
    os << to_json(t).dump(2) << '\n';
}

inline void write_table(std::ostream& os, Table const& t, OutputFormat f)
{
    if (f == OutputFormat::csv)
        write_csv(os, t);
    else
        write_json(os, t);
}

} // namespace kgheun

#endif // KGHEUN_TABLE_HPP
