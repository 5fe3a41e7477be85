#pragma once

#include "ssmcast/date.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ssmcast::ingest {

// Countries with fewer observed days than this are kept but not used for peak detection.
inline constexpr std::size_t kMinPeakDays = 14;
inline constexpr int kDefaultSmoothingWindow = 7;

struct CountrySeries {
	std::string name;
	std::string continent;
	std::int64_t population = 0;
	double population_density = 0.0;
	Date start_date{};
	std::vector<std::int64_t> cumulative_cases;
	std::vector<std::int64_t> daily_new_cases;
	std::optional<std::vector<std::int64_t>> cumulative_deaths;
	std::optional<std::vector<std::int64_t>> recovered;

	std::size_t size() const noexcept { return cumulative_cases.size(); }
	Date end_date() const noexcept { return start_date + std::chrono::days(static_cast<long>(size()) - 1); }
	bool usable_for_peak() const noexcept { return size() >= kMinPeakDays; }
	std::int64_t final_cases() const noexcept { return cumulative_cases.empty() ? 0 : cumulative_cases.back(); }
	// Final cumulative cases scaled per 10^6 inhabitants.
	double cases_per_million() const noexcept;
};

class Snapshot {
public:
	using Map = std::map<std::string, CountrySeries, std::less<>>;

	Snapshot() = default;
	Snapshot(Map countries, Date as_of_date);

	const Map &countries() const noexcept { return countries_; }
	Date as_of_date() const noexcept { return as_of_; }
	std::size_t size() const noexcept { return countries_.size(); }
	bool empty() const noexcept { return countries_.empty(); }
	const CountrySeries *find(std::string_view name) const;

private:
	Map countries_;
	Date as_of_{};
};

// Parses the canonical case CSV (see README for the column list).
// Throws SchemaError, RowError (with line number) or EmptyInputError.
Snapshot parse_snapshot(std::string_view csv_text);

// Canonical form: fixed column order, rows sorted by country then date, every day present.
std::string serialize_snapshot(const Snapshot &snapshot);

// Forward-fill gaps (a leading gap becomes 0) and clamp dips up to the running maximum.
std::vector<std::int64_t> impute(std::span<const std::optional<std::int64_t>> raw);

// Differencing with negative steps clamped to zero; the first element is kept as-is.
std::vector<std::int64_t> daily_from_cumulative(std::span<const std::int64_t> cumulative);

// Centered moving average with the window truncated at both ends.
std::vector<double> smooth(std::span<const double> series, int window);

} // namespace ssmcast::ingest
