#include "ssmcast/filters.hpp"

#include "ssmcast/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace ssmcast::filters {

namespace {

constexpr int kConvergenceMargin = 15;
constexpr int kTrailingDays = 7;
constexpr double kConvergenceDrop = 0.7;

double mean_of(std::span<const double> xs) {
	return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

} // namespace

PeakSummary detect_peak(std::span<const double> daily, int window) {
	if (daily.empty())
		throw InsufficientDataError("empty daily series");
	const auto smoothed = ingest::smooth(daily, window);
	const auto n = static_cast<int>(daily.size());
	// max_element returns the first maximum, which is the tie-break we want.
	const int p = static_cast<int>(std::max_element(smoothed.begin(), smoothed.end()) - smoothed.begin());
	if (p == 0)
		throw DegeneratePeakError("peak on the first day; rising-edge mean undefined");

	PeakSummary s;
	s.peak_day = p;
	s.peak_value = smoothed[static_cast<std::size_t>(p)];
	s.rising_mean = mean_of(daily.first(static_cast<std::size_t>(p)));
	s.falling_mean = mean_of(daily.subspan(static_cast<std::size_t>(p)));
	if (s.falling_mean > 0.0)
		s.ratio = s.rising_mean / s.falling_mean;
	const std::size_t trailing = std::min<std::size_t>(kTrailingDays, smoothed.size());
	const double tail = mean_of(std::span<const double>(smoothed).last(trailing));
	s.converged = p <= n - kConvergenceMargin && tail < kConvergenceDrop * s.peak_value;
	return s;
}

std::vector<double> observed_daily(const ingest::CountrySeries &country) {
	const auto &cum = country.cumulative_cases;
	const auto first = std::find_if(cum.begin(), cum.end(), [](std::int64_t v) { return v > 0; }) - cum.begin();
	std::vector<double> out;
	out.reserve(cum.size() - static_cast<std::size_t>(first));
	for (auto i = static_cast<std::size_t>(first); i < cum.size(); ++i)
		out.push_back(static_cast<double>(country.daily_new_cases[i]));
	return out;
}

PeakSummary detect_peak(const ingest::CountrySeries &country, int window) {
	const auto daily = observed_daily(country);
	if (daily.size() < ingest::kMinPeakDays)
		throw InsufficientDataError(country.name + ": " + std::to_string(daily.size()) + " observed days, need " +
		                            std::to_string(ingest::kMinPeakDays));
	try {
		return detect_peak(daily, window);
	} catch (const DegeneratePeakError &e) {
		throw DegeneratePeakError(country.name + ": " + e.what());
	}
}

std::vector<FilterSpec> builtin_filters() {
	return {
	    {"1", 20'000'000.0, 140.0, 500.0},
	    {"2", 10'000'000.0, 140.0, 400.0},
	    {"3", 5'500'000.0, 150.0, 100.0},
	};
}

void validate(const FilterSpec &spec) {
	if (spec.min_population < 0.0 || spec.max_peak_day < 0.0 || spec.min_cases_per_million < 0.0)
		throw ParameterError("filter '" + spec.id + "': thresholds must be non-negative");
}

FilterSpec parse_filter_json(std::string_view json_text) {
	nlohmann::json doc;
	try {
		doc = nlohmann::json::parse(json_text);
	} catch (const nlohmann::json::exception &e) {
		throw SchemaError(std::string("filter JSON: ") + e.what());
	}
	FilterSpec spec;
	try {
		const auto &id = doc.at("id");
		spec.id = id.is_string() ? id.get<std::string>() : id.dump();
		spec.min_population = doc.at("min_population").get<double>();
		spec.max_peak_day = doc.at("max_peak_day").get<double>();
		spec.min_cases_per_million = doc.at("min_cases_per_million").get<double>();
	} catch (const nlohmann::json::exception &e) {
		throw SchemaError(std::string("filter JSON: ") + e.what());
	}
	validate(spec);
	return spec;
}

FilterSpec resolve_filter(std::string_view id_or_path) {
	for (auto &spec : builtin_filters()) {
		if (spec.id == id_or_path)
			return spec;
	}
	std::ifstream in{std::string(id_or_path)};
	if (!in)
		throw ParameterError("unknown filter '" + std::string(id_or_path) + "' (expected 1, 2, 3 or a JSON file)");
	std::stringstream buf;
	buf << in.rdbuf();
	return parse_filter_json(buf.str());
}

Cohort apply_filter(const ingest::Snapshot &snapshot, const FilterSpec &spec, int window) {
	validate(spec);
	if (snapshot.empty())
		throw ParameterError("empty snapshot");
	Cohort cohort;
	for (const auto &[name, country] : snapshot.countries()) {
		if (!(static_cast<double>(country.population) > spec.min_population))
			continue;
		if (!(country.cases_per_million() > spec.min_cases_per_million))
			continue;
		PeakSummary peak;
		try {
			peak = detect_peak(country, window);
		} catch (const InsufficientDataError &) {
			continue;
		} catch (const DegeneratePeakError &) {
			continue;
		}
		if (peak.converged && static_cast<double>(peak.peak_day) < spec.max_peak_day)
			cohort.push_back({country, peak});
	}
	if (cohort.empty())
		throw EmptyCohortError("filter '" + spec.id + "' selected no countries");
	std::sort(cohort.begin(), cohort.end(), [](const CohortMember &a, const CohortMember &b) {
		if (a.country.population != b.country.population)
			return a.country.population > b.country.population;
		return a.country.name < b.country.name;
	});
	return cohort;
}

std::vector<double> average_curve(const Cohort &cohort) {
	if (cohort.empty())
		throw ParameterError("average_curve: empty cohort");
	std::vector<double> sum;
	std::vector<std::size_t> count;
	for (const auto &member : cohort) {
		const auto daily = observed_daily(member.country);
		const double scale = 1e6 / static_cast<double>(member.country.population);
		if (daily.size() > sum.size()) {
			sum.resize(daily.size(), 0.0);
			count.resize(daily.size(), 0);
		}
		for (std::size_t t = 0; t < daily.size(); ++t) {
			sum[t] += daily[t] * scale;
			++count[t];
		}
	}
	for (std::size_t t = 0; t < sum.size(); ++t)
		sum[t] /= static_cast<double>(count[t]);
	return sum;
}

} // namespace ssmcast::filters
