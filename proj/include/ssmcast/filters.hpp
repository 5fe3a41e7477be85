#pragma once

#include "ssmcast/ingest.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ssmcast::filters {

struct FilterSpec {
	std::string id;
	double min_population = 0.0;
	double max_peak_day = 0.0;
	double min_cases_per_million = 0.0;
};

struct PeakSummary {
	int peak_day = 0;          // days since first reported case
	double peak_value = 0.0;   // smoothed cases/day at the peak
	double rising_mean = 0.0;  // mean raw daily cases over [0, peak_day)
	double falling_mean = 0.0; // mean raw daily cases over [peak_day, n)
	std::optional<double> ratio;
	bool converged = false;
};

struct CohortMember {
	ingest::CountrySeries country;
	PeakSummary peak;
};

using Cohort = std::vector<CohortMember>;

// Peak statistics on a raw daily series starting at the first reported case.
// No minimum length is imposed here; throws DegeneratePeakError when the peak is day 0.
PeakSummary detect_peak(std::span<const double> daily, int window = ingest::kDefaultSmoothingWindow);

// Country overload: trims days before the first case and requires kMinPeakDays observed days.
PeakSummary detect_peak(const ingest::CountrySeries &country, int window = ingest::kDefaultSmoothingWindow);

// Daily new cases from the first reported case onwards.
std::vector<double> observed_daily(const ingest::CountrySeries &country);

std::vector<FilterSpec> builtin_filters();

// `{"id": ..., "min_population": N, "max_peak_day": N, "min_cases_per_million": N}`
FilterSpec parse_filter_json(std::string_view json_text);

// Resolves "1", "2", "3" to the builtin filters, anything else is read as a JSON file path.
FilterSpec resolve_filter(std::string_view id_or_path);

void validate(const FilterSpec &spec);

// Throws EmptyCohortError when nothing qualifies. Ordered by descending population, then name.
Cohort apply_filter(const ingest::Snapshot &snapshot, const FilterSpec &spec,
                    int window = ingest::kDefaultSmoothingWindow);

// Per-million daily curves aligned on the first reported case and averaged pointwise.
std::vector<double> average_curve(const Cohort &cohort);

} // namespace ssmcast::filters
