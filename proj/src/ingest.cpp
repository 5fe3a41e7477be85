#include "ssmcast/ingest.hpp"

#include "ssmcast/csv.hpp"
#include "ssmcast/error.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <charconv>
#include <sstream>
#include <unordered_map>

namespace ssmcast::ingest {

double CountrySeries::cases_per_million() const noexcept {
	if (population <= 0)
		return 0.0;
	return static_cast<double>(final_cases()) * 1e6 / static_cast<double>(population);
}

Snapshot::Snapshot(Map countries, Date as_of_date) : countries_(std::move(countries)), as_of_(as_of_date) {}

const CountrySeries *Snapshot::find(std::string_view name) const {
	auto it = countries_.find(name);
	return it == countries_.end() ? nullptr : &it->second;
}

namespace {

const std::vector<std::string> kColumns = {"date",         "country",   "continent",    "population",
                                           "population_density", "total_cases", "total_deaths", "recovered",
                                           "active_cases"};
const std::vector<std::string> kRequired = {"date", "country", "population", "total_cases"};

std::string_view trim(std::string_view s) {
	while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
		s.remove_prefix(1);
	while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
		s.remove_suffix(1);
	return s;
}

std::optional<std::int64_t> parse_count(std::string_view text, std::size_t line, const char *column) {
	text = trim(text);
	if (text.empty())
		return std::nullopt;
	std::int64_t value = 0;
	auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
	if (ec != std::errc{} || ptr != text.data() + text.size()) {
		// Some exports write integral counts as "123.0".
		double d = 0.0;
		auto [p2, ec2] = std::from_chars(text.data(), text.data() + text.size(), d);
		if (ec2 != std::errc{} || p2 != text.data() + text.size() || d != static_cast<double>(static_cast<std::int64_t>(d)))
			throw RowError(line, std::string("unparseable ") + column + " '" + std::string(text) + "'");
		value = static_cast<std::int64_t>(d);
	}
	if (value < 0)
		throw RowError(line, std::string("negative ") + column);
	return value;
}

struct RawCountry {
	std::string continent;
	std::optional<std::int64_t> population;
	std::optional<double> density;
	std::map<Date, std::array<std::optional<std::int64_t>, 3>> days; // cases, deaths, recovered
};

std::vector<std::int64_t> fill(const RawCountry &raw, Date start, std::size_t n, std::size_t slot, bool &any) {
	std::vector<std::optional<std::int64_t>> values(n);
	for (const auto &[date, cells] : raw.days) {
		values[static_cast<std::size_t>(days_between(start, date))] = cells[slot];
		any = any || cells[slot].has_value();
	}
	return impute(values);
}

} // namespace

Snapshot parse_snapshot(std::string_view text) {
	if (text.starts_with("\xEF\xBB\xBF"))
		text.remove_prefix(3);

	std::vector<std::string_view> lines;
	for (std::size_t pos = 0; pos <= text.size();) {
		std::size_t end = text.find('\n', pos);
		if (end == std::string_view::npos)
			end = text.size();
		lines.push_back(text.substr(pos, end - pos));
		pos = end + 1;
	}
	if (lines.empty() || trim(lines[0]).empty())
		throw SchemaError("missing header row");

	const auto header = csv::split_record(trim(lines[0]));
	std::unordered_map<std::string, std::size_t> index;
	for (std::size_t i = 0; i < header.size(); ++i)
		index.emplace(std::string(trim(header[i])), i);
	for (const auto &col : kRequired) {
		if (!index.contains(col))
			throw SchemaError("missing required column '" + col + "'");
	}
	auto column = [&](const std::string &name) -> std::optional<std::size_t> {
		auto it = index.find(name);
		return it == index.end() ? std::nullopt : std::optional<std::size_t>(it->second);
	};
	const std::size_t c_date = *column("date"), c_country = *column("country"), c_pop = *column("population"),
	                  c_cases = *column("total_cases");
	const auto c_continent = column("continent"), c_density = column("population_density"),
	           c_deaths = column("total_deaths"), c_recovered = column("recovered");

	std::map<std::string, RawCountry, std::less<>> raw;
	std::optional<Date> as_of;
	std::size_t rows = 0;
	for (std::size_t li = 1; li < lines.size(); ++li) {
		const std::size_t line_no = li + 1;
		if (trim(lines[li]).empty())
			continue;
		const auto fields = csv::split_record(trim(lines[li]));
		if (fields.size() < header.size())
			throw RowError(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
			                            std::to_string(fields.size()));
		const auto date = parse_iso_date(trim(fields[c_date]));
		if (!date)
			throw RowError(line_no, "unparseable date '" + fields[c_date] + "'");
		const std::string name(trim(fields[c_country]));
		if (name.empty())
			throw RowError(line_no, "empty country");
		const auto population = parse_count(fields[c_pop], line_no, "population");
		if (population && *population == 0)
			throw RowError(line_no, "population must be positive");

		auto &country = raw[name];
		if (population && !country.population)
			country.population = population;
		if (c_continent && country.continent.empty())
			country.continent = std::string(trim(fields[*c_continent]));
		if (c_density && !country.density) {
			const auto cell = trim(fields[*c_density]);
			if (!cell.empty()) {
				double d = 0.0;
				auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), d);
				if (ec != std::errc{} || ptr != cell.data() + cell.size() || d < 0.0)
					throw RowError(line_no, "bad population_density '" + std::string(cell) + "'");
				country.density = d;
			}
		}
		std::array<std::optional<std::int64_t>, 3> cells{
		    parse_count(fields[c_cases], line_no, "total_cases"),
		    c_deaths ? parse_count(fields[*c_deaths], line_no, "total_deaths") : std::nullopt,
		    c_recovered ? parse_count(fields[*c_recovered], line_no, "recovered") : std::nullopt};
		if (!country.days.emplace(*date, cells).second)
			throw RowError(line_no, "duplicate date " + format_iso_date(*date) + " for " + name);
		as_of = as_of ? std::max(*as_of, *date) : *date;
		++rows;
	}
	if (rows == 0)
		throw EmptyInputError();

	Snapshot::Map countries;
	for (auto &[name, rc] : raw) {
		if (!rc.population)
			throw SchemaError("country '" + name + "' has no population value");
		CountrySeries series;
		series.name = name;
		series.continent = rc.continent;
		series.population = *rc.population;
		series.population_density = rc.density.value_or(0.0);
		series.start_date = rc.days.begin()->first;
		const auto n = static_cast<std::size_t>(days_between(series.start_date, *as_of)) + 1;
		bool any = false;
		series.cumulative_cases = fill(rc, series.start_date, n, 0, any);
		series.daily_new_cases = daily_from_cumulative(series.cumulative_cases);
		any = false;
		auto deaths = fill(rc, series.start_date, n, 1, any);
		if (any)
			series.cumulative_deaths = std::move(deaths);
		any = false;
		auto recovered = fill(rc, series.start_date, n, 2, any);
		if (any)
			series.recovered = std::move(recovered);
		countries.emplace(name, std::move(series));
	}
	return Snapshot(std::move(countries), *as_of);
}

std::string serialize_snapshot(const Snapshot &snapshot) {
	std::ostringstream out;
	for (std::size_t i = 0; i < kColumns.size(); ++i)
		out << (i ? "," : "") << kColumns[i];
	out << '\n';
	for (const auto &[name, c] : snapshot.countries()) {
		const std::string prefix = csv::escape_field(name) + "," + csv::escape_field(c.continent) + "," +
		                           std::to_string(c.population) + "," + csv::format_exact(c.population_density) + ",";
		for (std::size_t t = 0; t < c.size(); ++t) {
			out << format_iso_date(c.start_date + std::chrono::days(static_cast<long>(t))) << ',' << prefix
			    << c.cumulative_cases[t] << ',';
			if (c.cumulative_deaths)
				out << (*c.cumulative_deaths)[t];
			out << ',';
			if (c.recovered)
				out << (*c.recovered)[t];
			out << ',';
			if (c.cumulative_deaths && c.recovered)
				out << c.cumulative_cases[t] - (*c.cumulative_deaths)[t] - (*c.recovered)[t];
			out << '\n';
		}
	}
	return out.str();
}

std::vector<std::int64_t> impute(std::span<const std::optional<std::int64_t>> raw) {
	std::vector<std::int64_t> out;
	out.reserve(raw.size());
	std::int64_t previous = 0;
	for (const auto &v : raw) {
		previous = std::max(previous, v.value_or(previous));
		out.push_back(previous);
	}
	return out;
}

std::vector<std::int64_t> daily_from_cumulative(std::span<const std::int64_t> cumulative) {
	std::vector<std::int64_t> daily(cumulative.size());
	for (std::size_t t = 0; t < cumulative.size(); ++t)
		daily[t] = t == 0 ? cumulative[0] : std::max<std::int64_t>(0, cumulative[t] - cumulative[t - 1]);
	return daily;
}

std::vector<double> smooth(std::span<const double> series, int window) {
	if (window < 1 || window % 2 == 0)
		throw ParameterError("smoothing window must be odd and >= 1, got " + std::to_string(window));
	if (static_cast<std::size_t>(window) > series.size())
		throw ParameterError("smoothing window " + std::to_string(window) + " exceeds series length " +
		                     std::to_string(series.size()));
	const auto n = static_cast<std::ptrdiff_t>(series.size());
	const std::ptrdiff_t half = window / 2;
	std::vector<double> out(series.size());
	for (std::ptrdiff_t i = 0; i < n; ++i) {
		const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
		const std::ptrdiff_t hi = std::min(n - 1, i + half);
		double sum = 0.0;
		for (std::ptrdiff_t j = lo; j <= hi; ++j)
			sum += series[static_cast<std::size_t>(j)];
		out[static_cast<std::size_t>(i)] = sum / static_cast<double>(hi - lo + 1);
	}
	return out;
}

} // namespace ssmcast::ingest
