#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cpref::csv {

// Splits one record on `sep`. Double-quoted fields may contain the separator
// and doubled quotes; embedded newlines are not supported.
std::vector<std::string> split(std::string_view line, char sep = ',');

// Quotes the field when it contains a comma, a quote or a line break.
std::string quote(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Reads the next non-empty line, without its trailing CR. Returns false at end of stream.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no);

// Shortest text that reads back to the same double.
std::string format_double(double value);
std::string format_optional(const std::optional<double>& value, std::string_view missing = "NA");

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);

std::string_view trim(std::string_view s);

}  // namespace cpref::csv
