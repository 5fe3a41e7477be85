#include "ssmcast/date.hpp"

#include <charconv>
#include <cstdio>

namespace ssmcast {

namespace {

bool parse_int(std::string_view text, int &value) {
	if (text.empty())
		return false;
	for (char c : text) {
		if (c < '0' || c > '9')
			return false;
	}
	auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
	return ec == std::errc{} && ptr == text.data() + text.size();
}

} // namespace

std::optional<Date> parse_iso_date(std::string_view text) {
	if (text.size() != 10 || text[4] != '-' || text[7] != '-')
		return std::nullopt;
	int y = 0, m = 0, d = 0;
	if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) || !parse_int(text.substr(8, 2), d))
		return std::nullopt;
	const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
	                                      std::chrono::day{static_cast<unsigned>(d)}};
	if (!ymd.ok())
		return std::nullopt;
	return Date{ymd};
}

std::string format_iso_date(Date date) {
	const std::chrono::year_month_day ymd{date};
	char buf[16];
	std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
	              static_cast<unsigned>(ymd.day()));
	return buf;
}

} // namespace ssmcast
