#pragma once

#include "ssmcast/ingest.hpp"

#include <string>
#include <vector>

namespace testing {

inline ssmcast::Date day(int offset) {
	using namespace std::chrono;
	return sys_days(year{2020} / January / 22) + days(offset);
}

// A country whose daily new cases are exactly `daily`, starting 2020-01-22.
inline ssmcast::ingest::CountrySeries make_country(const std::string &name, std::int64_t population, double density,
                                                   const std::vector<std::int64_t> &daily) {
	ssmcast::ingest::CountrySeries c;
	c.name = name;
	c.continent = "Test";
	c.population = population;
	c.population_density = density;
	c.start_date = day(0);
	std::int64_t total = 0;
	for (auto d : daily) {
		total += d;
		c.cumulative_cases.push_back(total);
		c.daily_new_cases.push_back(d);
	}
	return c;
}

// Rise over `rise` days to `height`, fall over `fall` days to `floor`.
inline std::vector<std::int64_t> tent(int rise, int fall, double height, double floor_value, double scale = 1.0) {
	std::vector<std::int64_t> out;
	for (int t = 1; t <= rise; ++t)
		out.push_back(static_cast<std::int64_t>(scale * height * t / rise));
	for (int t = 1; t <= fall; ++t)
		out.push_back(static_cast<std::int64_t>(scale * (height + (floor_value - height) * t / fall)));
	return out;
}

inline ssmcast::ingest::Snapshot make_snapshot(std::vector<ssmcast::ingest::CountrySeries> countries) {
	ssmcast::ingest::Snapshot::Map map;
	ssmcast::Date end{};
	for (auto &c : countries) {
		end = std::max(end, c.end_date());
		map.emplace(c.name, std::move(c));
	}
	return ssmcast::ingest::Snapshot(std::move(map), end);
}

} // namespace testing
