#include "helpers.hpp"
#include "oracles.hpp"

#include "ssmcast/error.hpp"
#include "ssmcast/regression.hpp"

#include <doctest.h>

#include <random>

using namespace ssmcast;
using regression::fit_ols;
using regression::predict;

namespace {

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
	Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
	Eigen::Index i = 0;
	for (const auto &r : rows) {
		Eigen::Index j = 0;
		for (double v : r)
			m(i, j++) = v;
		++i;
	}
	return m;
}

Eigen::VectorXd vec(std::initializer_list<double> xs) {
	Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
	Eigen::Index i = 0;
	for (double x : xs)
		v(i++) = x;
	return v;
}

} // namespace

TEST_CASE("fit_ols: exact line") {
	const auto m = fit_ols(mat({{1}, {2}, {3}}), vec({2, 4, 6}));
	CHECK(m.coefficients(0) == doctest::Approx(2.0).epsilon(1e-14));
	CHECK(m.intercept == doctest::Approx(0.0).epsilon(1e-14));
	CHECK(m.r_squared == doctest::Approx(1.0).epsilon(1e-14));
	const std::array<double, 1> x{5.0};
	CHECK(predict(m, x) == doctest::Approx(10.0).epsilon(1e-14));
}

TEST_CASE("fit_ols: exact plane") {
	const auto m = fit_ols(mat({{1, 0}, {0, 1}, {1, 1}, {0, 0}}), vec({1, 2, 3, 0}));
	CHECK(std::abs(m.intercept) < 1e-13);
	CHECK(m.coefficients(0) == doctest::Approx(1.0).epsilon(1e-13));
	CHECK(m.coefficients(1) == doctest::Approx(2.0).epsilon(1e-13));
	CHECK(m.r_squared == doctest::Approx(1.0).epsilon(1e-13));
	const std::array<double, 2> x{1.0, 1.0};
	CHECK(predict(m, x) == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("fit_ols: errors") {
	CHECK_THROWS_AS(fit_ols(mat({{1}, {2}, {3}}), vec({5, 5, 5})), DegenerateTargetError);
	try {
		fit_ols(mat({{1, 2}, {2, 4}, {3, 6}, {4, 8}}), vec({1, 3, 2, 5}), {"a", "b"});
		FAIL("expected singular design");
	} catch (const SingularDesignError &e) {
		CHECK((e.column() == "a" || e.column() == "b"));
	}
	try {
		fit_ols(mat({{1, 7}, {2, 7}, {3, 7}}), vec({1, 3, 2}), {"x", "flat"});
		FAIL("expected singular design");
	} catch (const SingularDesignError &e) {
		CHECK(e.column() == "flat");
	}
	CHECK_THROWS_AS(fit_ols(mat({{1, 2}, {2, 1}}), vec({1, 2})), InsufficientDataError);
	const auto m = fit_ols(mat({{1}, {2}, {3}}), vec({2, 4, 7}));
	const std::array<double, 2> wrong{1.0, 2.0};
	CHECK_THROWS_AS(predict(m, wrong), ParameterError);
}

TEST_CASE("fit_ols matches the normal-equations oracle on random designs") {
	std::mt19937_64 rng(20240601);
	std::normal_distribution<double> z(0.0, 1.0);
	for (int trial = 0; trial < 100; ++trial) {
		const int k = 1 + trial % 3, n = k + 3 + trial % 5;
		Eigen::MatrixXd X(n, k);
		Eigen::VectorXd y(n);
		oracle::Matrix Xo(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(k)));
		std::vector<double> yo(static_cast<std::size_t>(n));
		for (int i = 0; i < n; ++i) {
			double target = 1.5;
			for (int j = 0; j < k; ++j) {
				X(i, j) = Xo[i][j] = z(rng) * (j + 1) * 10.0;
				target += (j - 0.5) * X(i, j);
			}
			y(i) = yo[i] = target + z(rng);
		}
		const auto m = fit_ols(X, y);
		const auto ref = oracle::ols_normal_equations(Xo, yo);
		CHECK(m.intercept == doctest::Approx(ref[0]).epsilon(1e-8));
		for (int j = 0; j < k; ++j)
			CHECK(m.coefficients(j) == doctest::Approx(ref[static_cast<std::size_t>(j) + 1]).epsilon(1e-8));
		CHECK(m.r_squared >= 0.0);
		CHECK(m.r_squared <= 1.0);

		// Residuals are orthogonal to the intercept and every column.
		Eigen::VectorXd fitted(n);
		for (int i = 0; i < n; ++i) {
			std::vector<double> row;
			for (int j = 0; j < k; ++j)
				row.push_back(X(i, j));
			fitted(i) = predict(m, row);
		}
		const Eigen::VectorXd r = y - fitted;
		CHECK(std::abs(r.sum()) < 1e-8 * y.cwiseAbs().sum());
		for (int j = 0; j < k; ++j)
			CHECK(std::abs(r.dot(X.col(j))) < 1e-8 * X.col(j).norm() * y.norm());
	}
}

TEST_CASE("predict: centroid and affinity") {
	std::mt19937_64 rng(3);
	std::uniform_real_distribution<double> u(-5.0, 5.0);
	Eigen::MatrixXd X(8, 3);
	Eigen::VectorXd y(8);
	for (int i = 0; i < 8; ++i) {
		for (int j = 0; j < 3; ++j)
			X(i, j) = u(rng);
		y(i) = u(rng);
	}
	const auto m = fit_ols(X, y);
	const std::vector<double> centroid(m.feature_means.data(), m.feature_means.data() + 3);
	CHECK(predict(m, centroid) == doctest::Approx(y.mean()).epsilon(1e-12));
	const std::vector<double> a{1, 2, 3}, b{-4, 0.5, 2}, mid{-1.5, 1.25, 2.5};
	CHECK(predict(m, mid) == doctest::Approx((predict(m, a) + predict(m, b)) / 2).epsilon(1e-12));
}

TEST_CASE("constant model predicts its intercept") {
	regression::OlsModel m;
	m.intercept = 7.0;
	m.coefficients = Eigen::VectorXd::Zero(3);
	const std::array<double, 3> x{1e9, 42.0, -3.0};
	CHECK(predict(m, x) == 7.0);
}

namespace {

filters::CohortMember member(const std::string &name, std::int64_t pop, double density, std::int64_t total,
                             double peak_value, int peak_day) {
	auto c = testing::make_country(name, pop, density, {total});
	filters::PeakSummary p;
	p.peak_value = peak_value;
	p.peak_day = peak_day;
	p.converged = true;
	return {c, p};
}

} // namespace

TEST_CASE("fit_peak_models: exact plane cohort gives R2 = 1 everywhere") {
	// Features: population, cases per million (total * 1e6 / pop), density; targets are affine in them.
	struct Row {
		std::int64_t pop;
		double density;
		std::int64_t total;
	};
	const std::vector<Row> rows{{1'000'000, 10, 500}, {2'000'000, 40, 3000}, {4'000'000, 20, 1000},
	                            {3'000'000, 80, 9000}, {5'000'000, 5, 2500}};
	filters::Cohort cohort;
	for (std::size_t i = 0; i < rows.size(); ++i) {
		const auto &r = rows[i];
		const double cpm = static_cast<double>(r.total) * 1e6 / static_cast<double>(r.pop);
		const double x1 = static_cast<double>(r.pop) / 1e6;
		cohort.push_back(member("c" + std::to_string(i), r.pop, r.density, r.total, 100 + 2 * x1 + 0.5 * cpm - r.density,
		                        static_cast<int>(50 + 3 * x1)));
	}
	const auto models = regression::fit_peak_models(cohort);
	CHECK(models.model_peak_value.r_squared == doctest::Approx(1.0).epsilon(1e-10));
	CHECK(models.model_peak_day.r_squared == doctest::Approx(1.0).epsilon(1e-10));
	CHECK(models.model_total_cases.r_squared <= 1.0);
	CHECK(models.model_peak_value.feature_names ==
	      std::vector<std::string>{"population", "cases_per_million", "population_density"});

	const auto pred = regression::predict_targets(models, cohort[1].country);
	CHECK(pred.peak_value == doctest::Approx(cohort[1].peak.peak_value).epsilon(1e-9));
	CHECK(pred.peak_day == cohort[1].peak.peak_day);

	filters::Cohort three(cohort.begin(), cohort.begin() + 3);
	CHECK_THROWS_AS(regression::fit_peak_models(three), InsufficientDataError);
}

TEST_CASE("fit_peak_models tags errors with the target") {
	filters::Cohort cohort;
	for (int i = 0; i < 5; ++i)
		cohort.push_back(member("c" + std::to_string(i), 1'000'000 * (i + 1), 10.0 * (i % 3 + 1), 100 * (i * i + 1),
		                        50.0, 10 + i));
	CHECK_THROWS_WITH_AS(regression::fit_peak_models(cohort), doctest::Contains("peak_value"), DegenerateTargetError);
}

TEST_CASE("predict_targets clamps at zero and rounds the peak day") {
	regression::PeakRegression models;
	for (auto *m : {&models.model_peak_value, &models.model_peak_day, &models.model_total_cases})
		m->coefficients = Eigen::VectorXd::Zero(3);
	models.model_peak_value.intercept = -5.0;
	models.model_peak_day.intercept = 220.6;
	models.model_total_cases.intercept = 1e6;
	const auto target = testing::make_country("T", 1000, 1.0, {1, 2});
	const auto p = regression::predict_targets(models, target);
	CHECK(p.peak_value == 0.0);
	CHECK(p.peak_day == 221);
	CHECK(p.total_cases == 1e6);
}
