#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace ssmcast {

using Date = std::chrono::sys_days;

// Strict YYYY-MM-DD; returns nullopt for anything else, including invalid calendar days.
std::optional<Date> parse_iso_date(std::string_view text);

std::string format_iso_date(Date date);

inline long days_between(Date from, Date to) { return (to - from).count(); }

} // namespace ssmcast
