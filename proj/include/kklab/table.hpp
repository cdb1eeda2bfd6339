#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

namespace kklab {

enum class Format { Csv, Json };

Format parse_format(const std::string& name);
std::string format_name(Format f);

/// Column-named table of doubles, the interchange unit for every data file.
class Table {
public:
    explicit Table(std::vector<std::string> columns);

    const std::vector<std::string>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }

    void add_row(std::vector<double> row);
    void add_row(std::initializer_list<double> row) { add_row(std::vector<double>(row)); }

    /// Header line, then one line per row; every value printed with 17
    /// significant digits.
    std::string to_csv() const;
    /// {"columns": [...], "rows": [[...], ...]}
    nlohmann::json to_json() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

/// Shortest text carrying 17 significant digits ("%.17g").
std::string format_double(double v);

/// JSON text with 2-space indentation and floats at 17 significant digits.
/// Non-finite floats become null.
std::string dump_json(const nlohmann::json& j);

/// Writes `<dir>/<stem>.csv` or `<dir>/<stem>.json`; returns the file name.
std::string write_table(const Table& table, const std::filesystem::path& dir, const std::string& stem,
                        Format format);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace kklab
