#include "ssmcast/regression.hpp"

#include "ssmcast/error.hpp"

#include <cmath>

namespace ssmcast::regression {

namespace {

constexpr double kRankThreshold = 1e-10;

std::string column_name(const std::vector<std::string> &names, Eigen::Index j) {
	if (static_cast<std::size_t>(j) < names.size())
		return names[static_cast<std::size_t>(j)];
	return "column " + std::to_string(j);
}

} // namespace

OlsModel fit_ols(const Eigen::MatrixXd &X, const Eigen::VectorXd &y, std::vector<std::string> feature_names) {
	const Eigen::Index n = X.rows();
	const Eigen::Index k = X.cols();
	if (y.size() != n)
		throw ParameterError("fit_ols: " + std::to_string(n) + " design rows but " + std::to_string(y.size()) +
		                     " targets");
	if (n < k + 1)
		throw InsufficientDataError("fit_ols: need at least " + std::to_string(k + 1) + " rows, got " +
		                            std::to_string(n));

	const double y_mean = y.mean();
	const Eigen::VectorXd yc = y.array() - y_mean;
	const double ss_tot = yc.squaredNorm();
	if (ss_tot == 0.0)
		throw DegenerateTargetError("fit_ols: target is constant");

	OlsModel model;
	model.feature_names = std::move(feature_names);
	model.feature_means = X.colwise().mean().transpose();
	model.feature_scales.resize(k);
	Eigen::MatrixXd Z(n, k);
	for (Eigen::Index j = 0; j < k; ++j) {
		const Eigen::VectorXd centered = X.col(j).array() - model.feature_means(j);
		const double scale = std::sqrt(centered.squaredNorm() / static_cast<double>(n));
		if (!(scale > 0.0))
			throw SingularDesignError(column_name(model.feature_names, j),
			                          "fit_ols: feature '" + column_name(model.feature_names, j) + "' is constant");
		model.feature_scales(j) = scale;
		Z.col(j) = centered / scale;
	}

	Eigen::VectorXd beta_std = Eigen::VectorXd::Zero(k);
	if (k > 0) {
		const Eigen::MatrixXd normal = Z.transpose() * Z;
		const Eigen::VectorXd rhs = Z.transpose() * yc;
		Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(normal);
		qr.setThreshold(kRankThreshold);
		if (qr.rank() < k) {
			const Eigen::Index bad = qr.colsPermutation().indices()(qr.rank());
			throw SingularDesignError(column_name(model.feature_names, bad),
			                          "fit_ols: design is rank deficient at '" +
			                              column_name(model.feature_names, bad) + "'");
		}
		beta_std = qr.solve(rhs);
	}

	model.coefficients = beta_std.cwiseQuotient(model.feature_scales);
	model.intercept = y_mean - model.coefficients.dot(model.feature_means);
	const Eigen::VectorXd residual = yc - Z * beta_std;
	model.r_squared = 1.0 - residual.squaredNorm() / ss_tot;
	return model;
}

double predict(const OlsModel &model, std::span<const double> x) {
	if (static_cast<Eigen::Index>(x.size()) != model.coefficients.size())
		throw ParameterError("predict: expected " + std::to_string(model.coefficients.size()) + " features, got " +
		                     std::to_string(x.size()));
	double y = model.intercept;
	for (std::size_t j = 0; j < x.size(); ++j)
		y += model.coefficients(static_cast<Eigen::Index>(j)) * x[j];
	return y;
}

std::array<double, 3> peak_features(const ingest::CountrySeries &country) {
	return {static_cast<double>(country.population), country.cases_per_million(), country.population_density};
}

PeakRegression fit_peak_models(const filters::Cohort &cohort) {
	if (cohort.size() < 4)
		throw InsufficientDataError("fit_peak_models: cohort of " + std::to_string(cohort.size()) +
		                            " countries, need at least 4");
	const auto n = static_cast<Eigen::Index>(cohort.size());
	Eigen::MatrixXd X(n, 3);
	Eigen::VectorXd peak_value(n), peak_day(n), total(n);
	for (Eigen::Index i = 0; i < n; ++i) {
		const auto &m = cohort[static_cast<std::size_t>(i)];
		const auto f = peak_features(m.country);
		X.row(i) << f[0], f[1], f[2];
		peak_value(i) = m.peak.peak_value;
		peak_day(i) = m.peak.peak_day;
		total(i) = static_cast<double>(m.country.final_cases());
	}
	const std::vector<std::string> names(kPeakFeatures.begin(), kPeakFeatures.end());
	auto fit_target = [&](const Eigen::VectorXd &y, const std::string &target) {
		try {
			return fit_ols(X, y, names);
		} catch (const DegenerateTargetError &e) {
			throw DegenerateTargetError(target + ": " + e.what());
		} catch (const SingularDesignError &e) {
			throw SingularDesignError(e.column(), target + ": " + e.what());
		}
	};
	return {fit_target(peak_value, "peak_value"), fit_target(peak_day, "peak_day"),
	        fit_target(total, "total_cases")};
}

PeakPrediction predict_targets(const PeakRegression &models, const ingest::CountrySeries &target) {
	if (target.population <= 0)
		throw ParameterError("predict_targets: '" + target.name + "' has no population");
	const auto f = peak_features(target);
	PeakPrediction out;
	out.peak_value = std::max(0.0, predict(models.model_peak_value, f));
	out.peak_day = static_cast<int>(std::max(0.0, std::round(predict(models.model_peak_day, f))));
	out.total_cases = std::max(0.0, predict(models.model_total_cases, f));
	return out;
}

} // namespace ssmcast::regression
