#include "ssmcast/csv.hpp"

#include <charconv>
#include <cstdio>

namespace ssmcast::csv {

std::vector<std::string> split_record(std::string_view line) {
	std::vector<std::string> fields;
	std::string current;
	bool quoted = false;
	for (std::size_t i = 0; i < line.size(); ++i) {
		const char c = line[i];
		if (quoted) {
			if (c == '"') {
				if (i + 1 < line.size() && line[i + 1] == '"') {
					current.push_back('"');
					++i;
				} else {
					quoted = false;
				}
			} else {
				current.push_back(c);
			}
		} else if (c == '"') {
			quoted = true;
		} else if (c == ',') {
			fields.push_back(std::move(current));
			current.clear();
		} else {
			current.push_back(c);
		}
	}
	fields.push_back(std::move(current));
	return fields;
}

std::string escape_field(std::string_view field) {
	if (field.find_first_of(",\"\n\r") == std::string_view::npos)
		return std::string(field);
	std::string out = "\"";
	for (char c : field) {
		if (c == '"')
			out.push_back('"');
		out.push_back(c);
	}
	out.push_back('"');
	return out;
}

std::string format_exact(double value) {
	char buf[64];
	auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
	return std::string(buf, ptr);
}

std::string format_sig6(double value) {
	if (value == 0.0)
		value = 0.0; // no "-0" in output
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.6g", value);
	return buf;
}

} // namespace ssmcast::csv
