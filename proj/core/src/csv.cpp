#include "marketdef/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace marketdef {

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw SchemaError("missing column \"" + name + "\"");
}

namespace {

std::vector<std::string> parse_record(const std::string& text, std::size_t& pos,
                                      const std::string& origin, std::size_t line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool any = false;

    while (pos < text.size()) {
        const char c = text[pos];
        if (quoted) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field.push_back('"');
                    pos += 2;
                } else {
                    quoted = false;
                    ++pos;
                }
            } else {
                field.push_back(c);
                ++pos;
            }
            any = true;
            continue;
        }
        if (c == '"' && field.empty()) {
            quoted = true;
            any = true;
            ++pos;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            any = true;
            ++pos;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
            ++pos;
            break;
        } else {
            field.push_back(c);
            any = true;
            ++pos;
        }
    }
    if (quoted)
        throw ParseError(origin + ": unterminated quoted field at line " + std::to_string(line));
    if (any || !fields.empty()) fields.push_back(std::move(field));
    return fields;
}

bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\r\n") != std::string::npos;
}

} // namespace

CsvTable parse_csv(const std::string& text, const std::string& origin) {
    CsvTable t;
    std::size_t pos = 0;
    std::size_t line = 1;

    t.header = parse_record(text, pos, origin, line);
    if (t.header.empty()) throw SchemaError(origin + ": missing header row");

    while (pos < text.size()) {
        ++line;
        auto fields = parse_record(text, pos, origin, line);
        if (fields.empty()) continue; // blank line
        if (fields.size() != t.header.size())
            throw ParseError(origin + ": line " + std::to_string(line) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(t.header.size()));
        t.rows.push_back(std::move(fields));
    }
    return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path.string());
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string write_csv(const CsvTable& table) {
    std::string out;
    auto emit_row = [&out](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i != 0) out.push_back(',');
            if (needs_quoting(row[i])) {
                out.push_back('"');
                for (char c : row[i]) {
                    if (c == '"') out.push_back('"');
                    out.push_back(c);
                }
                out.push_back('"');
            } else {
                out += row[i];
            }
        }
        out.push_back('\n');
    };
    emit_row(table.header);
    for (const auto& row : table.rows) emit_row(row);
    return out;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column_name) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    // Tolerate surrounding spaces, not other junk.
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;
    double value = 0.0;
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last)
        throw ParseError("non-numeric cell \"" + cell + "\" at row " + std::to_string(row) +
                         ", column \"" + column_name + "\"");
    return value;
}

} // namespace marketdef
