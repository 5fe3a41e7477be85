#include "ssmcast/sarimax.hpp"

#include "ssmcast/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

namespace ssmcast::sarimax {

namespace {

constexpr double kSigma2Floor = 1e-12;
constexpr double kInitialStep = 0.25;

struct Prepared {
	Differenced diff;
	Eigen::MatrixXd regressors; // constant column followed by differenced exog
};

Eigen::MatrixXd difference_columns(const Eigen::MatrixXd &X, const SarimaxSpec &spec) {
	const Eigen::Index rows = X.rows() - spec.lost_to_differencing();
	Eigen::MatrixXd out(rows, X.cols());
	for (Eigen::Index j = 0; j < X.cols(); ++j) {
		std::vector<double> col(X.col(j).data(), X.col(j).data() + X.rows());
		const auto d = difference(col, spec.d, spec.D, spec.s).values;
		for (Eigen::Index i = 0; i < rows; ++i)
			out(i, j) = d[static_cast<std::size_t>(i)];
	}
	return out;
}

Prepared prepare(const SarimaxSpec &spec, std::span<const double> series, const Eigen::MatrixXd *exog) {
	validate(spec);
	const Eigen::Index n_exog = exog ? exog->cols() : 0;
	if (n_exog != spec.n_exog)
		throw ParameterError("spec declares " + std::to_string(spec.n_exog) + " exogenous columns, got " +
		                     std::to_string(n_exog));
	if (exog && exog->rows() != static_cast<Eigen::Index>(series.size()))
		throw ParameterError("exogenous matrix has " + std::to_string(exog->rows()) + " rows for a series of " +
		                     std::to_string(series.size()));
	Prepared prep;
	prep.diff = difference(series, spec.d, spec.D, spec.s);
	const auto n = static_cast<Eigen::Index>(prep.diff.values.size());
	prep.regressors.resize(n, 1 + n_exog);
	prep.regressors.col(0).setOnes();
	if (n_exog > 0)
		prep.regressors.rightCols(n_exog) = difference_columns(*exog, spec);
	return prep;
}

Eigen::VectorXd as_vector(std::span<const double> v) {
	Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
	for (std::size_t i = 0; i < v.size(); ++i)
		out(static_cast<Eigen::Index>(i)) = v[i];
	return out;
}

ArmaCoefficients coefficients_from(const SarimaxSpec &spec, std::span<const double> x) {
	auto take = [&](std::size_t offset, int count) { return x.subspan(offset, static_cast<std::size_t>(count)); };
	auto negate = [](std::vector<double> v) {
		for (auto &e : v)
			e = -e;
		return v;
	};
	ArmaCoefficients c;
	std::size_t off = 0;
	c.ar = constrain_stationary(take(off, spec.p));
	off += static_cast<std::size_t>(spec.p);
	c.ma = negate(constrain_stationary(take(off, spec.q)));
	off += static_cast<std::size_t>(spec.q);
	c.seasonal_ar = constrain_stationary(take(off, spec.P));
	off += static_cast<std::size_t>(spec.P);
	c.seasonal_ma = negate(constrain_stationary(take(off, spec.Q)));
	return c;
}

struct Profile {
	double loglik = -std::numeric_limits<double>::infinity();
	double sigma2 = 0.0;
	Eigen::VectorXd beta;
};

// Likelihood with sigma2 and the regression coefficients profiled out (GLS through the filter).
Profile profile(const SarimaxSpec &spec, const ArmaCoefficients &coeffs, const Prepared &prep) {
	Profile out;
	const auto &w = prep.diff.values;
	const auto n = static_cast<Eigen::Index>(w.size());
	const Eigen::Index k = prep.regressors.cols();
	Eigen::MatrixXd data(n, 1 + k);
	data.col(0) = as_vector(w);
	data.rightCols(k) = prep.regressors;
	const auto run = detail::run_filter(build_state_space(spec, coeffs, 1.0), data);
	if (!run.ok)
		return out;

	Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k, k);
	Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
	for (Eigen::Index t = 0; t < n; ++t) {
		const Eigen::RowVectorXd V = run.innovations.row(t).tail(k);
		const double f = run.variances(t);
		A.noalias() += V.transpose() * V / f;
		b.noalias() += V.transpose() * run.innovations(t, 0) / f;
	}
	Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
	qr.setThreshold(1e-12);
	out.beta = qr.solve(b);
	if (!out.beta.allFinite())
		out.beta.setZero();

	double ss = 0.0, logdet = 0.0;
	for (Eigen::Index t = 0; t < n; ++t) {
		const double e = run.innovations(t, 0) - run.innovations.row(t).tail(k).dot(out.beta);
		ss += e * e / run.variances(t);
		logdet += std::log(run.variances(t));
	}
	out.sigma2 = std::max(ss / static_cast<double>(n), kSigma2Floor);
	const double log2pi = std::log(2.0 * std::numbers::pi);
	out.loglik = -0.5 * (static_cast<double>(n) * (log2pi + std::log(out.sigma2)) + logdet + ss / out.sigma2);
	if (!std::isfinite(out.loglik))
		out.loglik = -std::numeric_limits<double>::infinity();
	return out;
}

struct SimplexResult {
	std::vector<double> x;
	double value = std::numeric_limits<double>::infinity();
	int iterations = 0;
};

// Plain Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
SimplexResult nelder_mead(const std::function<double(const std::vector<double> &)> &f, std::vector<double> x0,
                          double step, int max_iterations, double tolerance) {
	const std::size_t dim = x0.size();
	auto eval = [&](const std::vector<double> &x) {
		const double v = f(x);
		return std::isfinite(v) ? v : std::numeric_limits<double>::max();
	};
	std::vector<std::vector<double>> pts(dim + 1, x0);
	std::vector<double> vals(dim + 1);
	for (std::size_t i = 0; i < dim; ++i)
		pts[i + 1][i] += step;
	for (std::size_t i = 0; i <= dim; ++i)
		vals[i] = eval(pts[i]);

	std::vector<std::size_t> order(dim + 1);
	auto point = [&](const std::vector<double> &centroid, const std::vector<double> &worst, double coef) {
		std::vector<double> out(dim);
		for (std::size_t i = 0; i < dim; ++i)
			out[i] = centroid[i] + coef * (worst[i] - centroid[i]);
		return out;
	};

	int iter = 0;
	for (; iter < max_iterations; ++iter) {
		std::iota(order.begin(), order.end(), 0);
		std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
		const std::size_t best = order.front(), worst = order.back(), second = order[dim - 1];
		if (std::abs(vals[worst] - vals[best]) < tolerance && vals[best] < std::numeric_limits<double>::max())
			break;

		std::vector<double> centroid(dim, 0.0);
		for (std::size_t j = 0; j < dim; ++j) {
			for (std::size_t i = 0; i <= dim; ++i)
				if (i != worst)
					centroid[j] += pts[i][j];
			centroid[j] /= static_cast<double>(dim);
		}
		const auto reflected = point(centroid, pts[worst], -1.0);
		const double fr = eval(reflected);
		if (fr < vals[best]) {
			const auto expanded = point(centroid, pts[worst], -2.0);
			const double fe = eval(expanded);
			if (fe < fr) {
				pts[worst] = expanded;
				vals[worst] = fe;
			} else {
				pts[worst] = reflected;
				vals[worst] = fr;
			}
			continue;
		}
		if (fr < vals[second]) {
			pts[worst] = reflected;
			vals[worst] = fr;
			continue;
		}
		const bool outside = fr < vals[worst];
		const auto contracted = point(centroid, outside ? reflected : pts[worst], 0.5);
		const double fc = eval(contracted);
		if (fc < std::min(fr, vals[worst])) {
			pts[worst] = contracted;
			vals[worst] = fc;
			continue;
		}
		for (std::size_t i = 0; i <= dim; ++i) {
			if (i == best)
				continue;
			for (std::size_t j = 0; j < dim; ++j)
				pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
			vals[i] = eval(pts[i]);
		}
	}
	const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
	return {pts[best], vals[best], iter};
}

SarimaxFit package(const SarimaxSpec &spec, const ArmaCoefficients &c, const Profile &prof,
                   std::span<const double> series, const Eigen::MatrixXd *exog) {
	SarimaxFit fit;
	fit.spec = spec;
	fit.ar = c.ar;
	fit.ma = c.ma;
	fit.seasonal_ar = c.seasonal_ar;
	fit.seasonal_ma = c.seasonal_ma;
	fit.trend_const = prof.beta.size() > 0 ? prof.beta(0) : 0.0;
	fit.exog_beta.assign(prof.beta.data() + std::min<Eigen::Index>(1, prof.beta.size()),
	                     prof.beta.data() + prof.beta.size());
	fit.sigma2 = prof.sigma2;
	fit.log_likelihood = prof.loglik;
	fit.aic = 2.0 * fit.n_estimated() - 2.0 * fit.log_likelihood;
	fit.series.assign(series.begin(), series.end());
	if (exog)
		fit.exog = *exog;
	return fit;
}

Eigen::MatrixXd adjusted_observations(const SarimaxFit &fit, const Prepared &prep) {
	const auto n = static_cast<Eigen::Index>(prep.diff.values.size());
	Eigen::VectorXd coef(prep.regressors.cols());
	coef(0) = fit.trend_const;
	for (std::size_t j = 0; j < fit.exog_beta.size(); ++j)
		coef(static_cast<Eigen::Index>(j) + 1) = fit.exog_beta[j];
	Eigen::MatrixXd data(n, 1);
	data.col(0) = as_vector(prep.diff.values) - prep.regressors * coef;
	return data;
}

} // namespace

SarimaxFit apply_parameters(const SarimaxSpec &spec, const ArmaCoefficients &coeffs, double trend_const,
                            std::span<const double> exog_beta, double sigma2, std::span<const double> series,
                            const Eigen::MatrixXd *exog) {
	const auto prep = prepare(spec, series, exog);
	if (exog_beta.size() != static_cast<std::size_t>(spec.n_exog))
		throw ParameterError("apply_parameters: exog_beta has the wrong length");
	if (!(sigma2 > 0.0))
		throw ParameterError("apply_parameters: sigma2 must be positive");
	const auto ss = build_state_space(spec, coeffs, sigma2);
	Regression reg;
	reg.constant = trend_const;
	if (spec.n_exog > 0) {
		reg.exog = prep.regressors.rightCols(spec.n_exog);
		reg.beta = as_vector(exog_beta);
	}
	Profile prof;
	prof.sigma2 = sigma2;
	prof.beta.resize(1 + spec.n_exog);
	prof.beta(0) = trend_const;
	for (int j = 0; j < spec.n_exog; ++j)
		prof.beta(j + 1) = exog_beta[static_cast<std::size_t>(j)];
	prof.loglik = kalman_loglik(ss, prep.diff.values, reg);
	return package(spec, coeffs, prof, series, exog);
}

SarimaxFit fit(const SarimaxSpec &spec, std::span<const double> series, const Eigen::MatrixXd *exog,
               const FitOptions &options) {
	validate(spec);
	if (series.size() < 5 * static_cast<std::size_t>(spec.n_coefficients()))
		throw InsufficientDataError("fit: " + std::to_string(series.size()) + " observations for " +
		                            std::to_string(spec.n_coefficients()) + " coefficients");
	const auto prep = prepare(spec, series, exog);
	const auto &w = prep.diff.values;
	if (spec.n_arma() > 0 && std::all_of(w.begin(), w.end(), [&](double v) { return v == w.front(); }))
		throw FitFailureError("fit: (differenced) series is constant");

	const std::size_t dim = static_cast<std::size_t>(spec.n_arma());
	if (dim == 0) {
		const ArmaCoefficients none;
		const auto prof = profile(spec, none, prep);
		if (!std::isfinite(prof.loglik))
			throw FitFailureError("fit: likelihood is not finite");
		return package(spec, none, prof, series, exog);
	}

	auto objective = [&](const std::vector<double> &x) { return -profile(spec, coefficients_from(spec, x), prep).loglik; };

	SimplexResult best = nelder_mead(objective, std::vector<double>(dim, 0.0), kInitialStep, options.max_iterations,
	                                 options.tolerance);
	int iterations = best.iterations;
	for (int r = 1; r <= options.restarts; ++r) {
		auto start = best.x;
		for (std::size_t i = 0; i < dim; ++i)
			start[i] += 0.05 * r * (((i + static_cast<std::size_t>(r)) % 2) ? 1.0 : -1.0);
		auto trial = nelder_mead(objective, start, kInitialStep / r, options.max_iterations, options.tolerance);
		iterations += trial.iterations;
		if (trial.value < best.value)
			best = std::move(trial);
	}
	if (!(best.value < std::numeric_limits<double>::max()))
		throw FitFailureError("fit: likelihood not finite anywhere on the simplex");

	const auto coeffs = coefficients_from(spec, best.x);
	auto result = package(spec, coeffs, profile(spec, coeffs, prep), series, exog);
	result.iterations = iterations;
	return result;
}

ForecastResult forecast(const SarimaxFit &fit, int horizon, const Eigen::MatrixXd *future_exog) {
	if (horizon < 1)
		throw ParameterError("forecast: horizon must be >= 1");
	const auto &spec = fit.spec;
	const Eigen::Index h = horizon;
	if (spec.n_exog > 0 && (!future_exog || future_exog->rows() != h || future_exog->cols() != spec.n_exog))
		throw ParameterError("forecast: future exogenous matrix must be " + std::to_string(horizon) + " x " +
		                     std::to_string(spec.n_exog));
	if (spec.n_exog == 0 && future_exog && future_exog->cols() > 0)
		throw ParameterError("forecast: model has no exogenous regressors");

	const auto prep = prepare(spec, fit.series, spec.n_exog > 0 ? &fit.exog : nullptr);
	const auto ss = build_state_space(spec, fit.coefficients(), fit.sigma2);
	const auto run = detail::run_filter(ss, adjusted_observations(fit, prep));
	if (!run.ok)
		throw FitFailureError("forecast: filter failed on the training data");

	Eigen::MatrixXd future_reg = Eigen::MatrixXd::Zero(h, spec.n_exog);
	if (spec.n_exog > 0) {
		Eigen::MatrixXd joined(fit.exog.rows() + h, spec.n_exog);
		joined << fit.exog, *future_exog;
		future_reg = difference_columns(joined, spec).bottomRows(h);
	}

	const Eigen::MatrixXd RQR = fit.sigma2 * ss.R * ss.R.transpose();
	Eigen::VectorXd a = run.next_state.col(0);
	Eigen::MatrixXd P = run.next_cov;
	std::vector<double> w_hat(static_cast<std::size_t>(h));
	std::vector<Eigen::MatrixXd> covs;
	covs.reserve(static_cast<std::size_t>(h));
	for (Eigen::Index i = 0; i < h; ++i) {
		double reg = fit.trend_const;
		for (int j = 0; j < spec.n_exog; ++j)
			reg += future_reg(i, j) * fit.exog_beta[static_cast<std::size_t>(j)];
		w_hat[static_cast<std::size_t>(i)] = ss.Z.dot(a) + reg;
		covs.push_back(P);
		a = ss.T * a;
		P = ss.T * P * ss.T.transpose() + RQR;
	}

	ForecastResult out;
	out.variance.resize(static_cast<std::size_t>(h));
	if (spec.lost_to_differencing() == 0) {
		out.mean = w_hat;
		for (Eigen::Index i = 0; i < h; ++i)
			out.variance[static_cast<std::size_t>(i)] = ss.Z.dot(covs[static_cast<std::size_t>(i)] * ss.Z);
		return out;
	}

	out.mean = integrate_forward(w_hat, prep.diff.state);
	// Covariance of the differenced forecasts: Cov(w_i, w_j) = Z' T^(j-i) P_i Z for j >= i.
	Eigen::MatrixXd C(h, h);
	for (Eigen::Index i = 0; i < h; ++i) {
		Eigen::VectorXd g = covs[static_cast<std::size_t>(i)] * ss.Z;
		for (Eigen::Index j = i; j < h; ++j) {
			C(i, j) = C(j, i) = ss.Z.dot(g);
			g = ss.T * g;
		}
	}
	// Integration weights: response of the undifferencing recursion to a unit impulse.
	Differencing zero = prep.diff.state;
	for (auto &tail : zero.tails)
		std::fill(tail.begin(), tail.end(), 0.0);
	std::vector<double> impulse(static_cast<std::size_t>(h), 0.0);
	impulse[0] = 1.0;
	const auto weights = integrate_forward(impulse, zero);
	Eigen::VectorXd u(h);
	for (Eigen::Index k = 0; k < h; ++k) {
		for (Eigen::Index i = 0; i <= k; ++i)
			u(i) = weights[static_cast<std::size_t>(k - i)];
		const auto head = u.head(k + 1);
		out.variance[static_cast<std::size_t>(k)] = head.dot(C.topLeftCorner(k + 1, k + 1) * head);
	}
	return out;
}

std::vector<double> predict_in_sample(const SarimaxFit &fit) {
	const auto &spec = fit.spec;
	const auto prep = prepare(spec, fit.series, spec.n_exog > 0 ? &fit.exog : nullptr);
	const auto ss = build_state_space(spec, fit.coefficients(), fit.sigma2);
	const auto data = adjusted_observations(fit, prep);
	const auto run = detail::run_filter(ss, data);
	if (!run.ok)
		throw FitFailureError("predict_in_sample: filter failed");
	const auto lost = static_cast<std::size_t>(spec.lost_to_differencing());
	std::vector<double> out(fit.series.begin(), fit.series.end());
	const auto &w = prep.diff.values;
	for (std::size_t t = 0; t < w.size(); ++t) {
		const auto ti = static_cast<Eigen::Index>(t);
		// w_hat = Z a_{t|t-1} plus the regression part removed before filtering.
		const double w_hat = run.predictions(ti, 0) + (w[t] - data(ti, 0));
		out[lost + t] = w_hat + (fit.series[lost + t] - w[t]);
	}
	return out;
}

SarimaxSpec select_order(std::span<const double> series, std::span<const SarimaxSpec> grid, const FitOptions &options) {
	if (grid.empty())
		throw ParameterError("select_order: empty grid");
	std::optional<std::size_t> best;
	double best_aic = 0.0;
	int best_k = 0;
	for (std::size_t i = 0; i < grid.size(); ++i) {
		SarimaxFit candidate;
		try {
			candidate = fit(grid[i], series, nullptr, options);
		} catch (const Error &) {
			continue;
		}
		if (!std::isfinite(candidate.aic))
			continue;
		const int k = candidate.n_estimated();
		const bool tie = best && std::abs(candidate.aic - best_aic) <= 1e-9 * std::max(1.0, std::abs(best_aic));
		if (!best || (!tie && candidate.aic < best_aic) || (tie && k < best_k)) {
			best = i;
			best_aic = candidate.aic;
			best_k = k;
		}
	}
	if (!best)
		throw FitFailureError("select_order: every candidate failed to fit");
	return grid[*best];
}

std::string fit_to_json(const SarimaxFit &fit) {
	const auto &s = fit.spec;
	nlohmann::ordered_json j;
	j["spec"] = {{"p", s.p}, {"d", s.d}, {"q", s.q}, {"P", s.P}, {"D", s.D}, {"Q", s.Q}, {"s", s.s}, {"n_exog", s.n_exog}};
	j["ar"] = fit.ar;
	j["ma"] = fit.ma;
	j["seasonal_ar"] = fit.seasonal_ar;
	j["seasonal_ma"] = fit.seasonal_ma;
	j["exog_beta"] = fit.exog_beta;
	j["trend_const"] = fit.trend_const;
	j["sigma2"] = fit.sigma2;
	j["log_likelihood"] = fit.log_likelihood;
	j["aic"] = fit.aic;
	j["nobs"] = fit.series.size();
	return j.dump(2);
}

} // namespace ssmcast::sarimax
