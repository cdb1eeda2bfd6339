#include "kklab/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <algorithm>
#include <stdexcept>

#include "kklab/errors.hpp"

namespace kklab {

Format parse_format(const std::string& name) {
    if (name == "csv") return Format::Csv;
    if (name == "json") return Format::Json;
    throw InvalidInput("format must be csv or json, got '" + name + "'");
}

std::string format_name(Format f) { return f == Format::Csv ? "csv" : "json"; }

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw InvalidInput("table needs at least one column");
}

void Table::add_row(std::vector<double> row) {
    if (row.size() != columns_.size())
        throw InvalidInput("row has " + std::to_string(row.size()) + " values for " +
                           std::to_string(columns_.size()) + " columns");
    rows_.push_back(std::move(row));
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string Table::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += columns_[i];
    }
    out += '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

nlohmann::json Table::to_json() const {
    nlohmann::json j;
    j["columns"] = columns_;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : rows_) j["rows"].push_back(row);
    return j;
}

namespace {

void dump(const nlohmann::json& j, std::string& out, int depth) {
    const std::string pad(2 * (depth + 1), ' ');
    const std::string close(2 * depth, ' ');
    switch (j.type()) {
        case nlohmann::json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad + nlohmann::json(key).dump() + ": ";
                dump(value, out, depth + 1);
            }
            out += "\n" + close + "}";
            return;
        }
        case nlohmann::json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line (table rows, parameter lists).
            const bool flat = std::all_of(j.begin(), j.end(), [](const auto& e) { return e.is_primitive(); });
            if (flat) {
                out += "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) out += ", ";
                    dump(j[i], out, depth + 1);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                dump(j[i], out, depth + 1);
            }
            out += "\n" + close + "]";
            return;
        }
        case nlohmann::json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? format_double(v) : "null";
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace

std::string dump_json(const nlohmann::json& j) {
    std::string out;
    dump(j, out, 0);
    out += '\n';
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << text;
    if (!os) throw std::runtime_error("failed writing " + path.string());
}

std::string write_table(const Table& table, const std::filesystem::path& dir, const std::string& stem,
                        Format format) {
    const std::string name = stem + (format == Format::Csv ? ".csv" : ".json");
    write_text(dir / name, format == Format::Csv ? table.to_csv() : dump_json(table.to_json()));
    return name;
}

}  // namespace kklab
