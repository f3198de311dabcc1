#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ssc {

/// Shortest decimal string that parses back to exactly the same double
/// (printf %.17g trimmed via round-trip checks). All numeric output goes
/// through this so artifacts are byte-identical across runs and platforms.
std::string format_double(double value);

/// strtod with full-string validation; throws ParseError on junk.
double parse_double(const std::string& text, const std::string& context = "");

/// Integer parse with full-string validation; throws ParseError on junk.
long parse_long(const std::string& text, const std::string& context = "");

/// A rectangular comma-separated table with a header row. Fields are plain
/// tokens (no quoting or escaping); writers must not emit commas inside
/// fields.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;  // throws ParseError if absent
};

void write_table(std::ostream& out, const Table& table);
void write_table_file(const std::string& path, const Table& table);
Table read_table(std::istream& in, const std::string& context = "");
Table read_table_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ssc
