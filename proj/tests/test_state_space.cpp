#include "oracles.hpp"

#include "ssmcast/error.hpp"
#include "ssmcast/state_space.hpp"

#include <doctest.h>

#include <random>

using namespace ssmcast;
using namespace ssmcast::sarimax;

TEST_CASE("spec validation") {
	CHECK_NOTHROW(validate(SarimaxSpec{2, 1, 2, 1, 0, 1, 7, 0}));
	CHECK_THROWS_AS(validate(SarimaxSpec{-1, 0, 0}), ParameterError);
	CHECK_THROWS_AS(validate(SarimaxSpec{0, 0, 0, 1, 0, 0, 0}), ParameterError);
	CHECK_THROWS_AS(validate(SarimaxSpec{0, 0, 0, 1, 0, 0, 1}), ParameterError);
	const SarimaxSpec s{2, 1, 2, 1, 1, 1, 7, 2};
	CHECK(s.n_arma() == 6);
	CHECK(s.n_coefficients() == 8);
	CHECK(s.lost_to_differencing() == 8);
}

TEST_CASE("build_state_space: scalar AR(1)") {
	const auto ss = build_state_space({1, 0, 0}, {{0.5}, {}, {}, {}});
	CHECK(ss.m == 1);
	CHECK(ss.T(0, 0) == 0.5);
	CHECK(ss.Z(0) == 1.0);
	CHECK(ss.R(0) == 1.0);
}

TEST_CASE("build_state_space: MA(1) canonical form") {
	const auto ss = build_state_space({0, 0, 1}, {{}, {0.3}, {}, {}});
	CHECK(ss.m == 2);
	CHECK(ss.T == Eigen::Matrix2d{{0, 1}, {0, 0}});
	CHECK(ss.R(0) == 1.0);
	CHECK(ss.R(1) == 0.3);
	CHECK(ss.Z == Eigen::Vector2d{1, 0});
}

TEST_CASE("seasonal polynomial multiplication") {
	const ArmaCoefficients c{{0.5}, {}, {0.2}, {}};
	const auto phi = expand_ar(c, 7);
	REQUIRE(phi.size() == 8);
	CHECK(phi[0] == 0.5);
	CHECK(phi[6] == 0.2);
	CHECK(phi[7] == doctest::Approx(-0.1).epsilon(1e-15));
	for (int k : {1, 2, 3, 4, 5})
		CHECK(phi[static_cast<std::size_t>(k)] == 0.0);
	const auto ss = build_state_space({1, 0, 0, 1, 0, 0, 7}, c);
	CHECK(ss.m == 8);
	CHECK(ss.T(7, 0) == doctest::Approx(-0.1).epsilon(1e-15));

	const ArmaCoefficients m{{}, {0.4}, {}, {0.5}};
	const auto theta = expand_ma(m, 7);
	REQUIRE(theta.size() == 8);
	CHECK(theta[0] == 0.4);
	CHECK(theta[6] == 0.5);
	CHECK(theta[7] == doctest::Approx(0.2).epsilon(1e-15));
	CHECK(build_state_space({0, 0, 1, 0, 0, 1, 7}, m).m == 9);
}

TEST_CASE("stationarity and invertibility checks") {
	const std::vector<double> ok{0.5}, unit{1.0}, ar2_ok{0.5, 0.3}, ar2_bad{0.5, 0.6};
	CHECK(is_stationary(ok));
	CHECK_FALSE(is_stationary(unit));
	CHECK(is_stationary(ar2_ok));
	CHECK_FALSE(is_stationary(ar2_bad));
	CHECK(is_invertible(std::vector<double>{0.9}));
	CHECK_FALSE(is_invertible(std::vector<double>{-1.2}));
}

TEST_CASE("PACF transform maps onto stationary polynomials and round-trips") {
	std::mt19937_64 rng(5);
	std::normal_distribution<double> z(0.0, 2.0);
	for (int trial = 0; trial < 200; ++trial) {
		std::vector<double> x(static_cast<std::size_t>(1 + trial % 5));
		for (auto &v : x)
			v = z(rng);
		const auto phi = constrain_stationary(x);
		CHECK(is_stationary(phi));
		const auto back = unconstrain_stationary(phi);
		const auto phi2 = constrain_stationary(back);
		for (std::size_t i = 0; i < x.size(); ++i) {
			CHECK(std::abs(back[i] - x[i]) < 1e-10 * std::max(1.0, std::abs(x[i])));
			CHECK(std::abs(phi2[i] - phi[i]) < 1e-10);
		}
	}
	CHECK(constrain_stationary(std::vector<double>{0.0, 0.0}) == std::vector<double>{0.0, 0.0});
	CHECK_THROWS_AS(unconstrain_stationary(std::vector<double>{1.0}), ParameterError);
}

TEST_CASE("discrete Lyapunov solution") {
	Eigen::MatrixXd T{{0.5, 1.0}, {-0.2, 0.0}};
	Eigen::MatrixXd Q{{1.0, 0.3}, {0.3, 0.09}};
	Eigen::MatrixXd P;
	REQUIRE(solve_discrete_lyapunov(T, Q, P));
	CHECK((P - (T * P * T.transpose() + Q)).cwiseAbs().maxCoeff() < 1e-12);
	Eigen::MatrixXd unstable{{1.01}};
	Eigen::MatrixXd one{{1.0}};
	CHECK_FALSE(solve_discrete_lyapunov(unstable, one, P));
}

TEST_CASE("kalman_loglik: closed-form cases") {
	const auto wn = build_state_space({0, 0, 0}, {}, 1.0);
	CHECK(kalman_loglik(wn, std::vector<double>{0.0}) == doctest::Approx(-0.918938533204673).epsilon(1e-14));
	CHECK(kalman_loglik(wn, std::vector<double>{0.0, 0.0}) == doctest::Approx(-1.837877066409345).epsilon(1e-14));

	const auto ar = build_state_space({1, 0, 0}, {{0.5}, {}, {}, {}}, 1.0);
	const std::vector<double> y{1.0, 0.5};
	const double ll = kalman_loglik(ar, y);
	CHECK(std::abs(ll - oracle::ar_joint_loglik({0.5}, 1.0, y)) < 1e-12);
	CHECK(ll == doctest::Approx(-2.3567).epsilon(1e-4));

	const auto rw = build_state_space({1, 0, 0}, {{1.0}, {}, {}, {}}, 1.0);
	CHECK(kalman_loglik(rw, y) == -std::numeric_limits<double>::infinity());
	CHECK_THROWS_AS(kalman_loglik(wn, std::vector<double>{}), ParameterError);
}

TEST_CASE("kalman_loglik matches the joint Gaussian density for pure AR") {
	std::mt19937_64 rng(99);
	std::normal_distribution<double> z(0.0, 1.0);
	std::uniform_real_distribution<double> s2(0.2, 5.0);
	for (int draw = 0; draw < 50; ++draw) {
		const int p = 1 + draw % 4;
		const std::size_t n = 1 + static_cast<std::size_t>(draw % 8);
		std::vector<double> x(static_cast<std::size_t>(p));
		for (auto &v : x)
			v = z(rng);
		const auto phi = constrain_stationary(x);
		const double sigma2 = s2(rng);
		std::vector<double> y(n);
		for (auto &v : y)
			v = 2.0 * z(rng);
		const auto ss = build_state_space({p, 0, 0}, {phi, {}, {}, {}}, sigma2);
		CHECK(std::abs(kalman_loglik(ss, y) - oracle::ar_joint_loglik(phi, sigma2, y)) < 1e-8);
	}
}

TEST_CASE("kalman_loglik matches the MA(infinity) covariance for seasonal ARMA") {
	const std::vector<std::pair<SarimaxSpec, ArmaCoefficients>> models{
	    {{0, 0, 1}, {{}, {0.6}, {}, {}}},
	    {{1, 0, 1}, {{0.7}, {-0.4}, {}, {}}},
	    {{2, 0, 2}, {{0.3, 0.2}, {0.4, -0.3}, {}, {}}},
	    {{2, 0, 2, 1, 0, 1, 7}, {{0.3, 0.2}, {0.4, -0.3}, {0.5}, {0.6}}},
	};
	std::mt19937_64 rng(31);
	std::normal_distribution<double> z(0.0, 1.0);
	for (const auto &[spec, coeffs] : models) {
		std::vector<double> y(20);
		for (auto &v : y)
			v = 1.5 * z(rng);
		const auto ss = build_state_space(spec, coeffs, 1.7);
		const auto gamma = oracle::arma_autocovariance(expand_ar(coeffs, spec.s), expand_ma(coeffs, spec.s), 1.7, y.size());
		CHECK(kalman_loglik(ss, y) == doctest::Approx(oracle::toeplitz_gaussian_loglik(gamma, y)).epsilon(1e-10));
	}
}

TEST_CASE("likelihood is unchanged by zero exogenous columns") {
	const auto ss = build_state_space({2, 0, 1}, {{0.4, 0.2}, {0.3}, {}, {}}, 1.7);
	const std::vector<double> y{0.3, -1.2, 0.8, 2.0, 0.1, -0.4};
	Regression reg;
	reg.constant = 0.25;
	const double base = kalman_loglik(ss, y, reg);
	reg.exog = Eigen::MatrixXd::Zero(6, 3);
	reg.beta = Eigen::VectorXd::Zero(3);
	CHECK(kalman_loglik(ss, y, reg) == base);
	reg.exog.col(1).setLinSpaced(6, 1.0, 6.0);
	CHECK(kalman_loglik(ss, y, reg) == base);
}

TEST_CASE("difference: examples and inverse") {
	CHECK(difference(std::vector<double>{1, 3, 6, 10}, 1, 0, 0).values == std::vector<double>{2, 3, 4});
	CHECK(difference(std::vector<double>{1, 2, 3, 4, 5, 6}, 0, 1, 3).values == std::vector<double>{3, 3, 3});
	CHECK_THROWS_AS(difference(std::vector<double>{1, 2}, 1, 1, 3), InsufficientDataError);

	std::mt19937_64 rng(17);
	std::uniform_real_distribution<double> u(-10, 10);
	for (auto [d, D, s] : {std::tuple{1, 0, 0}, {2, 0, 0}, {0, 1, 7}, {1, 1, 7}, {0, 0, 0}}) {
		std::vector<double> x(40);
		for (auto &v : x)
			v = u(rng);
		const auto diff = difference(x, d, D, s);
		CHECK(diff.values.size() == x.size() - static_cast<std::size_t>(d + D * s));
		const auto back = undifference(diff.values, diff.state);
		REQUIRE(back.size() == x.size());
		for (std::size_t i = 0; i < x.size(); ++i)
			CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
	}
}

TEST_CASE("integrate_forward continues the integrated series") {
	const std::vector<double> x{1, 3, 6, 10};
	const auto diff = difference(x, 1, 0, 0);
	CHECK(integrate_forward(std::vector<double>{5, 6}, diff.state) == std::vector<double>{15, 21});
	const std::vector<double> seasonal{1, 2, 3, 4, 5, 6};
	const auto sd = difference(seasonal, 0, 1, 3);
	CHECK(integrate_forward(std::vector<double>{0, 0, 0, 1}, sd.state) == std::vector<double>{4, 5, 6, 5});
}
