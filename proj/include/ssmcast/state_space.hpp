#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace ssmcast::sarimax {

/// Orders of a multiplicative seasonal ARIMA with optional regressors.
struct SarimaxSpec {
	int p = 0, d = 0, q = 0;
	int P = 0, D = 0, Q = 0;
	int s = 0;
	int n_exog = 0;

	int n_arma() const noexcept { return p + q + P + Q; }
	int n_coefficients() const noexcept { return n_arma() + n_exog; }
	int lost_to_differencing() const noexcept { return d + D * s; }
	friend bool operator==(const SarimaxSpec &, const SarimaxSpec &) = default;
};

void validate(const SarimaxSpec &spec);

/// Lag polynomials in "sum" form: AR means y_t = sum ar[i] y_{t-1-i} + ..., MA means e_t + sum ma[i] e_{t-1-i}.
struct ArmaCoefficients {
	std::vector<double> ar, ma, seasonal_ar, seasonal_ma;
};

// Coefficient vector c with c[k-1] the weight at lag k of the expanded non-seasonal x seasonal product.
std::vector<double> expand_ar(const ArmaCoefficients &c, int s);
std::vector<double> expand_ma(const ArmaCoefficients &c, int s);

/// Harvey form: alpha_{t+1} = T alpha_t + R eps_t, y_t = Z alpha_t.
struct StateSpace {
	Eigen::MatrixXd T;
	Eigen::VectorXd Z;
	Eigen::VectorXd R;
	double sigma2 = 1.0;
	int m = 0;
};

StateSpace build_state_space(const SarimaxSpec &spec, const ArmaCoefficients &coeffs, double sigma2 = 1.0);

// All roots of the AR / MA lag polynomial outside the unit circle.
bool is_stationary(std::span<const double> ar_sum_form);
bool is_invertible(std::span<const double> ma_sum_form);

/// Maps unconstrained reals to a stationary AR polynomial through partial autocorrelations.
std::vector<double> constrain_stationary(std::span<const double> unconstrained);
std::vector<double> unconstrain_stationary(std::span<const double> constrained);

/// Solves P = T P T' + Q for stable T. Returns false if the iteration does not settle.
bool solve_discrete_lyapunov(const Eigen::MatrixXd &T, const Eigen::MatrixXd &Q, Eigen::MatrixXd &P);

/// Regression part of the observation: constant + exog * beta.
struct Regression {
	double constant = 0.0;
	Eigen::MatrixXd exog;
	Eigen::VectorXd beta;
};

// Exact Gaussian log-likelihood from the prediction-error decomposition with a
// stationary initial state. Returns -infinity when the model is not stationary
// or a prediction variance is not positive.
double kalman_loglik(const StateSpace &ss, std::span<const double> y, const Regression &reg = {});

namespace detail {

/// Output of one Kalman pass over several data columns sharing the same model.
/// Column 0 is usually the observations, the rest regressors to be profiled out.
struct FilterRun {
	Eigen::MatrixXd innovations; // n x c
	Eigen::VectorXd variances;   // f_t
	Eigen::MatrixXd next_state;  // m x c, a_{n+1|n}
	Eigen::MatrixXd next_cov;    // m x m, P_{n+1|n}
	Eigen::MatrixXd predictions; // n x c, Z a_{t|t-1}
	bool ok = false;
};

FilterRun run_filter(const StateSpace &ss, const Eigen::MatrixXd &data);

} // namespace detail

// (1-B)^d (1-B^s)^D; keeps what is needed to invert it.
struct Differencing {
	std::vector<int> lags;                 // one entry per applied (1-B^lag)
	std::vector<std::vector<double>> heads; // first `lag` values of each stage's input
	std::vector<std::vector<double>> tails; // last `lag` values of each stage's input
};

struct Differenced {
	std::vector<double> values;
	Differencing state;
};

Differenced difference(std::span<const double> series, int d, int D, int s);
std::vector<double> undifference(std::span<const double> differenced, const Differencing &state);
// Continues the integrated series past its end given future differenced values.
std::vector<double> integrate_forward(std::span<const double> future_differenced, const Differencing &state);

} // namespace ssmcast::sarimax
