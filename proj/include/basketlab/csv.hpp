#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace basketlab {

// Splits one delimited line into fields. Supports double-quoted fields with
// doubled quotes as escapes; embedded newlines are not supported.
std::vector<std::string> split_delimited(std::string_view line, char delimiter);

// Quotes a field if it contains the delimiter, a quote, or leading/trailing
// whitespace.
std::string csv_escape(std::string_view field, char delimiter);

} // namespace basketlab
