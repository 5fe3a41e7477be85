#pragma once

#include "ssmcast/filters.hpp"
#include "ssmcast/regression.hpp"
#include "ssmcast/sarimax.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ssmcast::ssm {

/// Cohort average of rising/falling edge mean ratios.
struct SsmCalibration {
	std::string filter_id;
	std::vector<std::pair<std::string, double>> per_country_ratios;
	double mean_ratio = 0.0;
	std::size_t n_countries = 0;
};

enum class BiasMode { multiplicative, additive };

BiasMode parse_bias_mode(const std::string &text);
std::string to_string(BiasMode mode);

struct SsmOptions {
	int horizon = 400;
	int smoothing_window = ingest::kDefaultSmoothingWindow;
	BiasMode bias_mode = BiasMode::multiplicative;
	sarimax::FitOptions fit_options{};
};

struct Forecast {
	std::string filter_id;
	std::string target_country;
	Date start_date{}; // date of day_index 0
	std::vector<double> daily_predicted;
	int peak_day = 0;
	double peak_value = 0.0;
	double total_cases = 0.0;
	double bias = 0.0;
	std::optional<double> r_squared;
	std::vector<std::string> warnings;
	std::optional<sarimax::SarimaxFit> fit;
};

/// Synthetic curve and the quantities it was built from.
struct SyntheticCurve {
	std::vector<double> values;
	int peak_day = 0;
	double rising_mean = 0.0; // mean over [0, peak_day]
	double bias = 0.0;
	double scale = 1.0;       // multiplier applied to the mirrored falling edge
};

SsmCalibration calibrate(const filters::Cohort &cohort, const std::string &filter_id);

double compute_bias(double target_rising_mean, const SsmCalibration &calibration);

// Lower-level form over an already smoothed observed curve.
SyntheticCurve synthesize_curve(std::span<const double> observed_smoothed, const regression::PeakPrediction &prediction,
                                const SsmCalibration &calibration, int horizon = 400,
                                BiasMode mode = BiasMode::multiplicative);

SyntheticCurve synthesize_curve(const ingest::CountrySeries &target, const regression::PeakPrediction &prediction,
                                const SsmCalibration &calibration, const SsmOptions &options = {});

Forecast run_ssm(const ingest::CountrySeries &target, const filters::Cohort &cohort,
                 const regression::PeakRegression &models, const sarimax::SarimaxSpec &spec,
                 const std::string &filter_id, const SsmOptions &options = {});

Forecast average_forecasts(std::span<const Forecast> forecasts);

// Fills peak_day, peak_value and total_cases from daily_predicted.
void refresh_statistics(Forecast &forecast);

} // namespace ssmcast::ssm
