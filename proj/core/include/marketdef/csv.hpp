#pragma once
// RFC-4180-style CSV: header row mandatory, double quotes with "" escapes,
// CRLF tolerated, UTF-8 passed through, '.' decimal separator.

#include <filesystem>
#include <string>
#include <vector>

#include "marketdef/errors.hpp"

namespace marketdef {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index by name; throws SchemaError naming the column if absent.
    std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text, const std::string& origin = "<string>");

// Shortest text that reads back to exactly the same double.
std::string format_double(double v);

// Quotes fields only when needed; "\n" line endings; trailing newline.
std::string write_csv(const CsvTable& table);

// Numeric cell parse with row/column context in the error message.
double parse_cell(const std::string& cell, std::size_t row, const std::string& column_name);

} // namespace marketdef
