#include "ssc/table.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ssc/errors.hpp"

namespace ssc {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    // Shortest of %.15g / %.16g / %.17g that survives a round trip.
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

double parse_double(const std::string& text, const std::string& context) {
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    double value = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0')) {
        fail(ErrorCode::ParseError,
             "expected a number, got '" + text + "'" +
                 (context.empty() ? "" : " (" + context + ")"));
    }
    return value;
}

long parse_long(const std::string& text, const std::string& context) {
    const char* begin = text.c_str();
    char* end = nullptr;
    errno = 0;
    long value = std::strtol(begin, &end, 10);
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0') || errno == ERANGE) {
        fail(ErrorCode::ParseError,
             "expected an integer, got '" + text + "'" +
                 (context.empty() ? "" : " (" + context + ")"));
    }
    return value;
}

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    fail(ErrorCode::ParseError, "missing column '" + name + "'");
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    // Trim surrounding spaces; fields are plain tokens.
    for (auto& f : fields) {
        std::size_t b = f.find_first_not_of(" \t");
        std::size_t e = f.find_last_not_of(" \t");
        f = (b == std::string::npos) ? "" : f.substr(b, e - b + 1);
    }
    return fields;
}

}  // namespace

void write_table(std::ostream& out, const Table& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out << ',';
        out << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
}

void write_table_file(const std::string& path, const Table& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    write_table(out, table);
    if (!out) fail(ErrorCode::IoError, "write to '" + path + "' failed");
}

Table read_table(std::istream& in, const std::string& context) {
    Table table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto fields = split_fields(line);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            std::ostringstream msg;
            msg << "row with " << fields.size() << " fields, expected "
                << table.header.size();
            if (!context.empty()) msg << " (" << context << ")";
            fail(ErrorCode::ParseError, msg.str());
        }
        table.rows.push_back(std::move(fields));
    }
    if (!have_header) {
        fail(ErrorCode::ParseError,
             "empty table" + (context.empty() ? "" : " (" + context + ")"));
    }
    return table;
}

Table read_table_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
    return read_table(in, path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    out << content;
    if (!out) fail(ErrorCode::IoError, "write to '" + path + "' failed");
}

}  // namespace ssc
