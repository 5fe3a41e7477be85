#pragma once

#include "ssmcast/state_space.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ssmcast::sarimax {

struct SarimaxFit {
	SarimaxSpec spec;
	std::vector<double> ar, ma, seasonal_ar, seasonal_ma;
	std::vector<double> exog_beta;
	double trend_const = 0.0;
	double sigma2 = 1.0;
	double log_likelihood = 0.0;
	double aic = 0.0;
	int iterations = 0;

	// Training data, kept for forecasting and in-sample prediction.
	std::vector<double> series;
	Eigen::MatrixXd exog;

	ArmaCoefficients coefficients() const { return {ar, ma, seasonal_ar, seasonal_ma}; }
	int n_estimated() const noexcept { return spec.n_coefficients() + 2; }
};

struct FitOptions {
	int max_iterations = 500;
	double tolerance = 1e-6;
	int restarts = 3;
};

/// Fixed-parameter filter pass: evaluates the likelihood and packages a fit
/// usable by forecast(). Used by tests and for externally supplied parameters.
SarimaxFit apply_parameters(const SarimaxSpec &spec, const ArmaCoefficients &coeffs, double trend_const,
                            std::span<const double> exog_beta, double sigma2, std::span<const double> series,
                            const Eigen::MatrixXd *exog = nullptr);

/// Maximum likelihood by Nelder-Mead on partial-autocorrelation parameters;
/// sigma2, the constant and exogenous coefficients are concentrated out.
SarimaxFit fit(const SarimaxSpec &spec, std::span<const double> series, const Eigen::MatrixXd *exog = nullptr,
               const FitOptions &options = {});

struct ForecastResult {
	std::vector<double> mean;
	std::vector<double> variance;
};

ForecastResult forecast(const SarimaxFit &fit, int horizon, const Eigen::MatrixXd *future_exog = nullptr);

/// One-step-ahead predictions over the training sample on the original scale.
/// The first d + D*s points have no prediction and are returned unchanged.
std::vector<double> predict_in_sample(const SarimaxFit &fit);

/// Minimum AIC; ties go to fewer parameters, then grid order.
SarimaxSpec select_order(std::span<const double> series, std::span<const SarimaxSpec> grid,
                         const FitOptions &options = {});

std::string fit_to_json(const SarimaxFit &fit);

} // namespace ssmcast::sarimax
