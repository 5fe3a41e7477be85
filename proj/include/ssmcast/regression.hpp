#pragma once

#include "ssmcast/filters.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <string>
#include <vector>

namespace ssmcast::regression {

/// Least-squares fit with intercept. Coefficients and intercept are in
/// original feature/target units; the standardization used while solving is
/// kept for reference.
struct OlsModel {
	double intercept = 0.0;
	Eigen::VectorXd coefficients;
	Eigen::VectorXd feature_means;
	Eigen::VectorXd feature_scales;
	double r_squared = 0.0;
	std::vector<std::string> feature_names;
};

/// Fits y ~ 1 + X. Throws DegenerateTargetError for constant y and
/// SingularDesignError (naming the offending column) for a rank-deficient design.
OlsModel fit_ols(const Eigen::MatrixXd &X, const Eigen::VectorXd &y,
                 std::vector<std::string> feature_names = {});

double predict(const OlsModel &model, std::span<const double> x);

inline const std::array<std::string, 3> kPeakFeatures = {"population", "cases_per_million",
                                                         "population_density"};

struct PeakRegression {
	OlsModel model_peak_value;
	OlsModel model_peak_day;
	OlsModel model_total_cases;
};

struct PeakPrediction {
	double peak_value = 0.0;
	int peak_day = 0;
	double total_cases = 0.0;
};

std::array<double, 3> peak_features(const ingest::CountrySeries &country);

// Needs at least four cohort members.
PeakRegression fit_peak_models(const filters::Cohort &cohort);

PeakPrediction predict_targets(const PeakRegression &models, const ingest::CountrySeries &target);

} // namespace ssmcast::regression
