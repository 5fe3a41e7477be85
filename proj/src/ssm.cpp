#include "ssmcast/ssm.hpp"

#include "ssmcast/error.hpp"

#include <algorithm>
#include <numeric>

namespace ssmcast::ssm {

namespace {

constexpr double kTailRatioFloor = 0.5;
constexpr double kTailRatioCap = 0.999;

double mean_of(std::span<const double> xs) {
	return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

std::vector<double> smoothed_observed(const ingest::CountrySeries &target, int window) {
	const auto daily = filters::observed_daily(target);
	if (daily.empty())
		throw InsufficientDataError(target.name + ": no reported cases");
	int w = std::min<int>(window, static_cast<int>(daily.size()));
	if (w % 2 == 0)
		--w;
	return ingest::smooth(daily, std::max(w, 1));
}

template <typename F>
auto stage(const char *name, F &&f) -> decltype(f()) {
	try {
		return f();
	} catch (const PipelineError &) {
		throw;
	} catch (const Error &e) {
		throw PipelineError(name, e.what());
	}
}

} // namespace

BiasMode parse_bias_mode(const std::string &text) {
	if (text == "multiplicative")
		return BiasMode::multiplicative;
	if (text == "additive")
		return BiasMode::additive;
	throw ParameterError("bias_mode must be 'multiplicative' or 'additive', got '" + text + "'");
}

std::string to_string(BiasMode mode) { return mode == BiasMode::additive ? "additive" : "multiplicative"; }

SsmCalibration calibrate(const filters::Cohort &cohort, const std::string &filter_id) {
	if (cohort.empty())
		throw ParameterError("calibrate: empty cohort");
	SsmCalibration cal;
	cal.filter_id = filter_id;
	double sum = 0.0;
	for (const auto &m : cohort) {
		if (!m.peak.converged)
			throw ParameterError("calibrate: '" + m.country.name + "' has not converged");
		if (!(m.peak.falling_mean > 0.0))
			throw CalibrationError("calibrate: '" + m.country.name + "' has a zero falling-edge mean");
		const double ratio = m.peak.rising_mean / m.peak.falling_mean;
		if (!(ratio > 0.0))
			throw CalibrationError("calibrate: '" + m.country.name + "' has a zero rising-edge mean");
		cal.per_country_ratios.emplace_back(m.country.name, ratio);
		sum += ratio;
	}
	cal.n_countries = cal.per_country_ratios.size();
	cal.mean_ratio = sum / static_cast<double>(cal.n_countries);
	return cal;
}

double compute_bias(double target_rising_mean, const SsmCalibration &calibration) {
	if (!(calibration.mean_ratio > 0.0))
		throw CalibrationError("compute_bias: mean ratio must be positive");
	if (target_rising_mean < 0.0)
		throw ParameterError("compute_bias: rising-edge mean must be non-negative");
	return target_rising_mean / calibration.mean_ratio;
}

SyntheticCurve synthesize_curve(std::span<const double> observed, const regression::PeakPrediction &prediction,
                                const SsmCalibration &calibration, int horizon, BiasMode mode) {
	if (observed.empty())
		throw ParameterError("synthesize_curve: no observed values");
	const int n_obs = static_cast<int>(observed.size());
	// A peak predicted inside the observed window is moved to its last day: observations are kept verbatim.
	const int peak = std::max(prediction.peak_day, n_obs - 1);
	if (horizon <= peak)
		throw ParameterError("synthesize_curve: horizon " + std::to_string(horizon) + " does not extend past peak day " +
		                     std::to_string(peak));

	SyntheticCurve out;
	out.peak_day = peak;
	auto &v = out.values;
	v.assign(static_cast<std::size_t>(horizon), 0.0);
	std::copy(observed.begin(), observed.end(), v.begin());
	const double last = observed.back();
	for (int t = n_obs; t <= peak; ++t) {
		const double frac = static_cast<double>(t - (n_obs - 1)) / static_cast<double>(peak - (n_obs - 1));
		v[static_cast<std::size_t>(t)] = std::max(0.0, last + (prediction.peak_value - last) * frac);
	}

	out.rising_mean = mean_of(std::span<const double>(v).first(static_cast<std::size_t>(peak) + 1));
	out.bias = compute_bias(out.rising_mean, calibration);

	const int fall = horizon - 1 - peak;
	std::vector<double> mirror(static_cast<std::size_t>(fall));
	double ratio = kTailRatioFloor;
	if (peak >= 1 && v[1] > 0.0)
		ratio = std::clamp(v[0] / v[1], kTailRatioFloor, kTailRatioCap);
	for (int k = 1; k <= fall; ++k) {
		const int src = peak - k;
		mirror[static_cast<std::size_t>(k - 1)] =
		    src >= 0 ? v[static_cast<std::size_t>(src)] : mirror[static_cast<std::size_t>(k - 2)] * ratio;
	}

	if (mode == BiasMode::multiplicative) {
		const double raw_mean = mean_of(mirror);
		if (raw_mean > 0.0) {
			out.scale = out.bias / raw_mean;
			for (auto &x : mirror)
				x *= out.scale;
		} else {
			std::fill(mirror.begin(), mirror.end(), out.bias);
		}
	} else {
		for (auto &x : mirror)
			x += out.bias;
	}
	for (int k = 0; k < fall; ++k)
		v[static_cast<std::size_t>(peak + 1 + k)] = std::max(0.0, mirror[static_cast<std::size_t>(k)]);
	return out;
}

SyntheticCurve synthesize_curve(const ingest::CountrySeries &target, const regression::PeakPrediction &prediction,
                                const SsmCalibration &calibration, const SsmOptions &options) {
	return synthesize_curve(smoothed_observed(target, options.smoothing_window), prediction, calibration,
	                        options.horizon, options.bias_mode);
}

void refresh_statistics(Forecast &f) {
	const auto &d = f.daily_predicted;
	if (d.empty()) {
		f.peak_day = 0;
		f.peak_value = 0.0;
		f.total_cases = 0.0;
		return;
	}
	const auto it = std::max_element(d.begin(), d.end());
	f.peak_day = static_cast<int>(it - d.begin());
	f.peak_value = *it;
	f.total_cases = std::accumulate(d.begin(), d.end(), 0.0);
}

Forecast run_ssm(const ingest::CountrySeries &target, const filters::Cohort &cohort,
                 const regression::PeakRegression &models, const sarimax::SarimaxSpec &spec,
                 const std::string &filter_id, const SsmOptions &options) {
	Forecast out;
	out.filter_id = filter_id;
	out.target_country = target.name;
	out.r_squared = models.model_peak_value.r_squared;
	const auto &cum = target.cumulative_cases;
	const auto first = std::find_if(cum.begin(), cum.end(), [](std::int64_t c) { return c > 0; }) - cum.begin();
	out.start_date = target.start_date + std::chrono::days(first);

	bool converged = false;
	try {
		converged = filters::detect_peak(target, options.smoothing_window).converged;
	} catch (const InsufficientDataError &) {
	} catch (const DegeneratePeakError &) {
	}
	if (converged) {
		out.daily_predicted = smoothed_observed(target, options.smoothing_window);
		out.warnings.push_back(target.name + " has already converged; returning the observed smoothed curve");
		refresh_statistics(out);
		return out;
	}

	const auto calibration = stage("calibrate", [&] { return calibrate(cohort, filter_id); });
	const auto prediction = stage("predict", [&] { return regression::predict_targets(models, target); });
	const auto curve = stage("synthesize", [&] { return synthesize_curve(target, prediction, calibration, options); });
	auto fitted = stage("sarimax", [&] { return sarimax::fit(spec, curve.values, nullptr, options.fit_options); });
	auto smoothed = stage("sarimax", [&] { return sarimax::predict_in_sample(fitted); });
	for (auto &x : smoothed)
		x = std::max(0.0, x);

	out.daily_predicted = std::move(smoothed);
	out.bias = curve.bias;
	out.fit = std::move(fitted);
	refresh_statistics(out);
	return out;
}

Forecast average_forecasts(std::span<const Forecast> forecasts) {
	if (forecasts.empty())
		throw ParameterError("average_forecasts: nothing to average");
	const auto &head = forecasts.front();
	Forecast out;
	out.filter_id = "average";
	out.target_country = head.target_country;
	out.start_date = head.start_date;
	out.daily_predicted.assign(head.daily_predicted.size(), 0.0);
	for (const auto &f : forecasts) {
		if (f.target_country != head.target_country)
			throw ParameterError("average_forecasts: mixed targets '" + head.target_country + "' and '" +
			                     f.target_country + "'");
		if (f.daily_predicted.size() != head.daily_predicted.size())
			throw ParameterError("average_forecasts: mixed horizons");
		for (std::size_t t = 0; t < f.daily_predicted.size(); ++t)
			out.daily_predicted[t] += f.daily_predicted[t];
		out.bias += f.bias;
		out.warnings.insert(out.warnings.end(), f.warnings.begin(), f.warnings.end());
	}
	const auto k = static_cast<double>(forecasts.size());
	for (auto &x : out.daily_predicted)
		x /= k;
	out.bias /= k;
	refresh_statistics(out);
	return out;
}

} // namespace ssmcast::ssm
