#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ssmcast::csv {

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_record(std::string_view line);

// Quotes a field only when it needs it.
std::string escape_field(std::string_view field);

// Shortest representation that parses back to the same double.
std::string format_exact(double value);

// Six significant digits, used for every numeric output column.
std::string format_sig6(double value);

} // namespace ssmcast::csv
