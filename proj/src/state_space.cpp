#include "ssmcast/state_space.hpp"

#include "ssmcast/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ssmcast::sarimax {

void validate(const SarimaxSpec &spec) {
	if (spec.p < 0 || spec.d < 0 || spec.q < 0 || spec.P < 0 || spec.D < 0 || spec.Q < 0 || spec.s < 0 ||
	    spec.n_exog < 0)
		throw ParameterError("SARIMAX orders must be non-negative");
	if (spec.s == 0 && (spec.P || spec.D || spec.Q))
		throw ParameterError("seasonal orders require a seasonal period");
	if (spec.s == 1)
		throw ParameterError("seasonal period must be 0 or at least 2");
}

namespace {

// Multiplies two polynomials given as coefficient arrays starting at B^0.
std::vector<double> poly_mul(const std::vector<double> &a, const std::vector<double> &b) {
	std::vector<double> out(a.size() + b.size() - 1, 0.0);
	for (std::size_t i = 0; i < a.size(); ++i)
		for (std::size_t j = 0; j < b.size(); ++j)
			out[i + j] += a[i] * b[j];
	return out;
}

std::vector<double> lag_poly(const std::vector<double> &coeffs, int lag, double sign) {
	std::vector<double> poly(coeffs.size() * static_cast<std::size_t>(lag) + 1, 0.0);
	poly[0] = 1.0;
	for (std::size_t i = 0; i < coeffs.size(); ++i)
		poly[(i + 1) * static_cast<std::size_t>(lag)] = sign * coeffs[i];
	return poly;
}

std::vector<double> trim_trailing(std::vector<double> v) {
	while (!v.empty() && v.back() == 0.0)
		v.pop_back();
	return v;
}

Eigen::MatrixXd companion(std::span<const double> coeffs) {
	const auto p = static_cast<Eigen::Index>(coeffs.size());
	Eigen::MatrixXd C = Eigen::MatrixXd::Zero(p, p);
	for (Eigen::Index i = 0; i < p; ++i)
		C(0, i) = coeffs[static_cast<std::size_t>(i)];
	for (Eigen::Index i = 1; i < p; ++i)
		C(i, i - 1) = 1.0;
	return C;
}

} // namespace

std::vector<double> expand_ar(const ArmaCoefficients &c, int s) {
	const auto prod = poly_mul(lag_poly(c.ar, 1, -1.0), lag_poly(c.seasonal_ar, std::max(s, 1), -1.0));
	std::vector<double> out(prod.size() - 1);
	for (std::size_t k = 1; k < prod.size(); ++k)
		out[k - 1] = -prod[k];
	return trim_trailing(std::move(out));
}

std::vector<double> expand_ma(const ArmaCoefficients &c, int s) {
	const auto prod = poly_mul(lag_poly(c.ma, 1, 1.0), lag_poly(c.seasonal_ma, std::max(s, 1), 1.0));
	return trim_trailing(std::vector<double>(prod.begin() + 1, prod.end()));
}

StateSpace build_state_space(const SarimaxSpec &spec, const ArmaCoefficients &coeffs, double sigma2) {
	if (coeffs.ar.size() != static_cast<std::size_t>(spec.p) || coeffs.ma.size() != static_cast<std::size_t>(spec.q) ||
	    coeffs.seasonal_ar.size() != static_cast<std::size_t>(spec.P) ||
	    coeffs.seasonal_ma.size() != static_cast<std::size_t>(spec.Q))
		throw ParameterError("ARMA coefficient counts do not match the spec");
	// Sized from the orders, not the trimmed products, so m is stable across parameter values.
	const int p_star = spec.p + spec.P * spec.s;
	const int q_star = spec.q + spec.Q * spec.s;
	const int m = std::max({p_star, q_star + 1, 1});
	const auto phi = expand_ar(coeffs, spec.s);
	const auto theta = expand_ma(coeffs, spec.s);

	StateSpace ss;
	ss.m = m;
	ss.sigma2 = sigma2;
	ss.T = Eigen::MatrixXd::Zero(m, m);
	for (std::size_t i = 0; i < phi.size(); ++i)
		ss.T(static_cast<Eigen::Index>(i), 0) = phi[i];
	for (int i = 0; i + 1 < m; ++i)
		ss.T(i, i + 1) = 1.0;
	ss.Z = Eigen::VectorXd::Zero(m);
	ss.Z(0) = 1.0;
	ss.R = Eigen::VectorXd::Zero(m);
	ss.R(0) = 1.0;
	for (std::size_t i = 0; i < theta.size(); ++i)
		ss.R(static_cast<Eigen::Index>(i) + 1) = theta[i];
	return ss;
}

bool is_stationary(std::span<const double> ar) {
	if (ar.empty())
		return true;
	const Eigen::VectorXcd eig = companion(ar).eigenvalues();
	return eig.cwiseAbs().maxCoeff() < 1.0;
}

bool is_invertible(std::span<const double> ma) {
	std::vector<double> neg(ma.begin(), ma.end());
	for (auto &v : neg)
		v = -v;
	return is_stationary(neg);
}

std::vector<double> constrain_stationary(std::span<const double> x) {
	const std::size_t p = x.size();
	std::vector<double> phi(p, 0.0), prev(p, 0.0);
	for (std::size_t k = 0; k < p; ++k) {
		const double r = x[k] / std::sqrt(1.0 + x[k] * x[k]);
		prev = phi;
		for (std::size_t i = 0; i < k; ++i)
			phi[i] = prev[i] - r * prev[k - 1 - i];
		phi[k] = r;
	}
	return phi;
}

std::vector<double> unconstrain_stationary(std::span<const double> constrained) {
	const std::size_t p = constrained.size();
	std::vector<double> phi(constrained.begin(), constrained.end());
	std::vector<double> r(p, 0.0);
	for (std::size_t kk = p; kk-- > 0;) {
		r[kk] = phi[kk];
		const double denom = 1.0 - r[kk] * r[kk];
		if (!(denom > 0.0))
			throw ParameterError("unconstrain_stationary: coefficients are not stationary");
		std::vector<double> prev(kk, 0.0);
		for (std::size_t i = 0; i < kk; ++i)
			prev[i] = (phi[i] + r[kk] * phi[kk - 1 - i]) / denom;
		std::copy(prev.begin(), prev.end(), phi.begin());
	}
	std::vector<double> x(p);
	for (std::size_t k = 0; k < p; ++k)
		x[k] = r[k] / std::sqrt(1.0 - r[k] * r[k]);
	return x;
}

bool solve_discrete_lyapunov(const Eigen::MatrixXd &T, const Eigen::MatrixXd &Q, Eigen::MatrixXd &P) {
	// Doubling: P_{k+1} = P_k + A_k P_k A_k', A_{k+1} = A_k^2.
	Eigen::MatrixXd A = T;
	P = Q;
	for (int iter = 0; iter < 100; ++iter) {
		const Eigen::MatrixXd step = A * P * A.transpose();
		P += step;
		if (!P.allFinite())
			return false;
		const double scale = std::max(P.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
		if (step.cwiseAbs().maxCoeff() <= 1e-15 * scale) {
			P = 0.5 * (P + P.transpose());
			return true;
		}
		A = A * A;
		if (!A.allFinite())
			return false;
	}
	return false;
}

namespace detail {

FilterRun run_filter(const StateSpace &ss, const Eigen::MatrixXd &data) {
	FilterRun run;
	const Eigen::Index n = data.rows();
	const Eigen::Index c = data.cols();
	const Eigen::Index m = ss.m;
	const Eigen::MatrixXd RQR = ss.sigma2 * ss.R * ss.R.transpose();
	Eigen::MatrixXd P;
	if (!solve_discrete_lyapunov(ss.T, RQR, P))
		return run;

	Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, c);
	const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
	Eigen::MatrixXd L(m, m);
	run.innovations.resize(n, c);
	run.predictions.resize(n, c);
	run.variances.resize(n);
	for (Eigen::Index t = 0; t < n; ++t) {
		const Eigen::RowVectorXd pred = ss.Z.transpose() * a;
		const Eigen::VectorXd PZ = P * ss.Z;
		const double f = ss.Z.dot(PZ);
		if (!(f > 0.0) || !std::isfinite(f))
			return run;
		const Eigen::RowVectorXd v = data.row(t) - pred;
		run.predictions.row(t) = pred;
		run.innovations.row(t) = v;
		run.variances(t) = f;
		const Eigen::VectorXd gain = PZ / f;
		a += gain * v;
		// Joseph form: keeps P symmetric and positive semidefinite when the stationary
		// covariance is badly conditioned (roots close to the unit circle).
		L.noalias() = I - gain * ss.Z.transpose();
		P = L * P * L.transpose();
		a = ss.T * a;
		P = ss.T * P * ss.T.transpose() + RQR;
	}
	run.next_state = a;
	run.next_cov = 0.5 * (P + P.transpose());
	run.ok = true;
	return run;
}

} // namespace detail

double kalman_loglik(const StateSpace &ss, std::span<const double> y, const Regression &reg) {
	if (y.empty())
		throw ParameterError("kalman_loglik: no observations");
	const auto n = static_cast<Eigen::Index>(y.size());
	Eigen::MatrixXd data(n, 1);
	for (Eigen::Index t = 0; t < n; ++t)
		data(t, 0) = y[static_cast<std::size_t>(t)] - reg.constant;
	if (reg.exog.size() > 0) {
		if (reg.exog.rows() != n || reg.beta.size() != reg.exog.cols())
			throw ParameterError("kalman_loglik: exogenous dimensions do not match");
		data.col(0) -= reg.exog * reg.beta;
	}
	const auto run = detail::run_filter(ss, data);
	if (!run.ok)
		return -std::numeric_limits<double>::infinity();
	const double log2pi = std::log(2.0 * std::numbers::pi);
	double ll = 0.0;
	for (Eigen::Index t = 0; t < n; ++t) {
		const double f = run.variances(t);
		const double v = run.innovations(t, 0);
		ll += -0.5 * (log2pi + std::log(f) + v * v / f);
	}
	return ll;
}

Differenced difference(std::span<const double> series, int d, int D, int s) {
	if (d < 0 || D < 0 || (D > 0 && s < 1))
		throw ParameterError("difference: invalid orders");
	const std::size_t lost = static_cast<std::size_t>(d + D * s);
	if (series.size() <= lost)
		throw InsufficientDataError("difference: series of length " + std::to_string(series.size()) +
		                            " is too short for d + D*s = " + std::to_string(lost));
	Differenced out;
	std::vector<double> current(series.begin(), series.end());
	std::vector<int> lags(static_cast<std::size_t>(D), s);
	lags.insert(lags.end(), static_cast<std::size_t>(d), 1);
	for (int lag : lags) {
		const auto L = static_cast<std::size_t>(lag);
		out.state.lags.push_back(lag);
		out.state.heads.emplace_back(current.begin(), current.begin() + static_cast<std::ptrdiff_t>(L));
		out.state.tails.emplace_back(current.end() - static_cast<std::ptrdiff_t>(L), current.end());
		std::vector<double> next(current.size() - L);
		for (std::size_t i = 0; i < next.size(); ++i)
			next[i] = current[i + L] - current[i];
		current = std::move(next);
	}
	out.values = std::move(current);
	return out;
}

std::vector<double> undifference(std::span<const double> differenced, const Differencing &state) {
	std::vector<double> current(differenced.begin(), differenced.end());
	for (std::size_t stage = state.lags.size(); stage-- > 0;) {
		const auto L = static_cast<std::size_t>(state.lags[stage]);
		std::vector<double> restored(state.heads[stage]);
		restored.resize(L + current.size());
		for (std::size_t i = 0; i < current.size(); ++i)
			restored[L + i] = current[i] + restored[i];
		current = std::move(restored);
	}
	return current;
}

std::vector<double> integrate_forward(std::span<const double> future, const Differencing &state) {
	std::vector<double> current(future.begin(), future.end());
	for (std::size_t stage = state.lags.size(); stage-- > 0;) {
		const auto L = static_cast<std::size_t>(state.lags[stage]);
		const auto &tail = state.tails[stage];
		std::vector<double> next(current.size());
		for (std::size_t i = 0; i < current.size(); ++i)
			next[i] = current[i] + (i < L ? tail[i] : next[i - L]);
		current = std::move(next);
	}
	return current;
}

} // namespace ssmcast::sarimax
