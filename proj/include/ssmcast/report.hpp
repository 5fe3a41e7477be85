#pragma once

#include "ssmcast/filters.hpp"
#include "ssmcast/regression.hpp"
#include "ssmcast/ssm.hpp"

#include <span>
#include <string>

namespace ssmcast::report {

// `day_index,date,filter_id,predicted_new_cases`, one block per forecast in the given order.
std::string forecast_csv(std::span<const ssm::Forecast> per_filter, const ssm::Forecast &average);

// {target, per_filter: [{filter_id, peak_day, peak_value, total_cases, r_squared}], average: {...}}
std::string forecast_summary_json(std::span<const ssm::Forecast> per_filter, const ssm::Forecast &average);

std::string forecast_svg(std::span<const ssm::Forecast> per_filter, const ssm::Forecast &average);

std::string cohort_csv(const filters::Cohort &cohort);

struct ReportRow {
	std::string filter_id;
	std::size_t cohort_size = 0;
	double r2_peak_value = 0.0;
	double r2_peak_day = 0.0;
	double r2_total_cases = 0.0;
	regression::PeakPrediction prediction;
};

std::string report_csv(std::span<const ReportRow> rows);

} // namespace ssmcast::report
