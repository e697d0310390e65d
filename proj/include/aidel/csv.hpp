#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aidel::csv {

// RFC 4180 quoting: fields with commas, quotes or newlines are quoted.
void write_row(std::ostream& out, std::span<const std::string> fields);
std::vector<std::vector<std::string>> read_all(std::istream& in);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
double parse_double(std::string_view text);

}  // namespace aidel::csv
