#include "helpers.hpp"

#include "ssmcast/cli.hpp"
#include "ssmcast/error.hpp"
#include "ssmcast/report.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ssmcast;
using testing::make_country;
using testing::tent;
namespace fs = std::filesystem;

namespace {

struct TempDir {
	fs::path path;
	TempDir() {
		static int counter = 0;
		path = fs::temp_directory_path() / ("ssmcast_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
		fs::create_directories(path);
	}
	~TempDir() { fs::remove_all(path); }
	std::string file(const std::string &name) const { return (path / name).string(); }
	std::string write(const std::string &name, const std::string &content) const {
		std::ofstream(path / name, std::ios::binary) << content;
		return file(name);
	}
};

std::string slurp(const std::string &path) {
	std::ifstream in(path, std::ios::binary);
	std::stringstream s;
	s << in.rdbuf();
	return s.str();
}

ingest::Snapshot small_snapshot() {
	std::vector<ingest::CountrySeries> countries;
	for (int i = 0; i < 6; ++i)
		countries.push_back(make_country("Country " + std::to_string(i), 10'000'000 + 3'000'000 * i,
		                                 20.0 + 31 * (i % 4), tent(30 + 4 * i, 60, 800.0 + 150 * i + 40 * (i % 3), 30)));
	auto target = make_country("Risingland", 40'000'000, 120.0, tent(60, 0, 500, 0));
	target.start_date = testing::day(50);
	countries.push_back(target);
	return testing::make_snapshot(countries);
}

constexpr const char *kLooseFilter = R"({"id": "loose", "min_population": 1000000, "max_peak_day": 200,
                                        "min_cases_per_million": 1})";
constexpr const char *kFastConfig = R"({"order": [1, 1, 0], "horizon": 160})";

} // namespace

TEST_CASE("config: defaults, overlay and validation") {
	const cli::PipelineConfig defaults;
	CHECK(defaults.smoothing_window == 7);
	CHECK(defaults.order == sarimax::SarimaxSpec{2, 1, 2, 1, 0, 1, 7, 0});
	CHECK(defaults.horizon == 400);
	CHECK(defaults.filters == std::vector<std::string>{"1", "2", "3"});

	const auto cfg = cli::apply_config_json(defaults, R"({"smoothing_window": 5, "order": [1, 0, 1],
	    "seasonal_order": [1, 0, 0, 7], "horizon": 200, "bias_mode": "additive", "filters": ["1", 2],
	    "order_search": true, "order_grid": [[0, 1, 0, 0, 0, 0, 0], [1, 1, 0, 1, 0, 0, 7]],
	    "max_iterations": 50, "tolerance": 1e-4, "restarts": 1, "seed": 7})");
	CHECK(cfg.smoothing_window == 5);
	CHECK(cfg.order == sarimax::SarimaxSpec{1, 0, 1, 1, 0, 0, 7, 0});
	CHECK(cfg.horizon == 200);
	CHECK(cfg.bias_mode == ssm::BiasMode::additive);
	CHECK(cfg.filters == std::vector<std::string>{"1", "2"});
	CHECK(cfg.order_search);
	REQUIRE(cfg.order_grid.size() == 2);
	CHECK(cfg.order_grid[1] == sarimax::SarimaxSpec{1, 1, 0, 1, 0, 0, 7, 0});
	CHECK(cfg.fit_options.max_iterations == 50);
	CHECK(cfg.fit_options.restarts == 1);
	CHECK(cfg.seed == 7);
	const auto opts = cfg.ssm_options();
	CHECK(opts.horizon == 200);
	CHECK(opts.smoothing_window == 5);

	CHECK_THROWS_AS(cli::apply_config_json(defaults, R"({"unknown": 1})"), SchemaError);
	CHECK_THROWS_AS(cli::apply_config_json(defaults, R"({"horizon": "long"})"), SchemaError);
	CHECK_THROWS_AS(cli::apply_config_json(defaults, "[1]"), SchemaError);
	CHECK_THROWS_AS(cli::apply_config_json(defaults, R"({"smoothing_window": 4})"), ParameterError);
	CHECK_THROWS_AS(cli::apply_config_json(defaults, R"({"order": [1, 2]})"), SchemaError);
}

TEST_CASE("config: explicit path wins over SSM_CONFIG") {
	TempDir dir;
	const auto env_cfg = dir.write("env.json", R"({"horizon": 111})");
	const auto arg_cfg = dir.write("arg.json", R"({"horizon": 222})");
	::setenv("SSM_CONFIG", env_cfg.c_str(), 1);
	CHECK(cli::load_config(std::nullopt).horizon == 111);
	CHECK(cli::load_config(arg_cfg).horizon == 222);
	::unsetenv("SSM_CONFIG");
	CHECK(cli::load_config(std::nullopt).horizon == 400);
}

TEST_CASE("split_list and near misses") {
	CHECK(cli::split_list("1, 2,3") == std::vector<std::string>{"1", "2", "3"});
	CHECK(cli::split_list("a,,b ") == std::vector<std::string>{"a", "b"});
	const auto snap = testing::make_snapshot(
	    {make_country("India", 1, 1, {1}), make_country("Indonesia", 1, 1, {1}), make_country("Chad", 1, 1, {1})});
	const auto near = cli::near_miss_names(snap, "indai");
	REQUIRE_FALSE(near.empty());
	CHECK(near.front() == "India");
	CHECK(cli::near_miss_names(snap, "donesia").front() == "Indonesia");
	CHECK(cli::near_miss_names(snap, "Zzzzzzzzzz").empty());
	const auto us = testing::make_snapshot({make_country("Australia", 1, 1, {1}), make_country("Austria", 1, 1, {1}),
	                                        make_country("Belarus", 1, 1, {1}), make_country("USA", 1, 1, {1})});
	CHECK(cli::near_miss_names(us, "UA").front() == "USA");
}

TEST_CASE("cmd_ingest: canonical output, idempotence and schema errors") {
	TempDir dir;
	const auto raw = dir.write("raw.csv", "country,date,population,total_cases\n"
	                                      "B,2020-01-23,20,3\nB,2020-01-22,20,1\nA,2020-01-23,10,\n");
	std::ostringstream out, err;
	REQUIRE(cli::cmd_ingest({raw, dir.file("c1.csv")}, out, err) == cli::kOk);
	CHECK(out.str().find("2 countries") != std::string::npos);
	REQUIRE(cli::cmd_ingest({dir.file("c1.csv"), dir.file("c2.csv")}, out, err) == cli::kOk);
	CHECK(slurp(dir.file("c1.csv")) == slurp(dir.file("c2.csv")));

	const auto empty = dir.write("empty.csv", "date,country,population,total_cases\n");
	std::ostringstream e2;
	CHECK(cli::cmd_ingest({empty, dir.file("x.csv")}, out, e2) == cli::kSchema);
	CHECK(e2.str().find("no data rows") != std::string::npos);

	const auto bad = dir.write("bad.csv", "date,country,population,total_cases\n2020-01-01,A,10,1\nnot-a-date,A,10,2\n");
	std::ostringstream e3;
	CHECK(cli::cmd_ingest({bad, dir.file("x.csv")}, out, e3) == cli::kSchema);
	CHECK(e3.str().find("line 3") != std::string::npos);

	CHECK(cli::cmd_ingest({dir.file("missing.csv"), dir.file("x.csv")}, out, err) == cli::kFailure);
}

TEST_CASE("cmd_filter: listing, CSV and empty cohort") {
	TempDir dir;
	const auto snap = dir.write("snap.csv", ingest::serialize_snapshot(small_snapshot()));
	const auto loose = dir.write("loose.json", kLooseFilter);
	std::ostringstream out, err;
	REQUIRE(cli::cmd_filter({snap, loose, dir.file("cohort.csv"), std::nullopt}, out, err) == cli::kOk);
	CHECK(out.str() == slurp(dir.file("cohort.csv")));
	std::size_t lines = 0;
	for (char c : out.str())
		lines += c == '\n';
	CHECK(lines == 7); // header + 6 converged countries
	CHECK(out.str().rfind("country,population,cases_per_million,population_density,peak_day,peak_value,", 0) == 0);

	const auto impossible =
	    dir.write("none.json", R"({"id": "none", "min_population": 1e12, "max_peak_day": 1, "min_cases_per_million": 0})");
	std::ostringstream o2, e2;
	CHECK(cli::cmd_filter({snap, impossible, std::nullopt, std::nullopt}, o2, e2) == cli::kEmptyCohort);
	CHECK(cli::cmd_filter({snap, "9", std::nullopt, std::nullopt}, o2, e2) == cli::kFailure);
}

TEST_CASE("cmd_forecast: outputs, determinism and exit codes") {
	TempDir dir;
	const auto snap = dir.write("snap.csv", ingest::serialize_snapshot(small_snapshot()));
	const auto loose = dir.write("loose.json", kLooseFilter);
	const auto cfg = dir.write("cfg.json", kFastConfig);

	cli::ForecastArgs args;
	args.snapshot = snap;
	args.target = "Risingland";
	args.filters = loose + "," + loose;
	args.config = cfg;
	args.out = dir.file("a.csv");
	args.plot = dir.file("a.svg");
	args.dump_fit = dir.file("fit.json");
	std::ostringstream out, err;
	REQUIRE(cli::cmd_forecast(args, out, err) == cli::kOk);

	const auto csv = slurp(dir.file("a.csv"));
	CHECK(csv.rfind("day_index,date,filter_id,predicted_new_cases\n", 0) == 0);
	std::size_t rows = 0;
	for (char c : csv)
		rows += c == '\n';
	CHECK(rows == 1 + 3 * 160);
	CHECK(csv.find("\n0,2020-03-12,loose,") != std::string::npos);
	CHECK(csv.find(",average,") != std::string::npos);

	const auto summary = nlohmann::json::parse(slurp(dir.file("a.json")));
	CHECK(summary["target"] == "Risingland");
	CHECK(summary["per_filter"].size() == 2);
	CHECK(summary["average"]["filter_id"] == "average");
	const auto fits = nlohmann::json::parse(slurp(dir.file("fit.json")));
	CHECK(fits.size() == 2);
	CHECK(fits[0]["fit"]["spec"]["p"] == 1);
	const auto svg = slurp(dir.file("a.svg"));
	CHECK(svg.find("<svg") == 0);
	CHECK(std::count(svg.begin(), svg.end(), '\n') > 10);
	CHECK(svg.find("days since first reported case") != std::string::npos);
	CHECK(svg.find("cases/day") != std::string::npos);

	args.out = dir.file("b.csv");
	args.plot = dir.file("b.svg");
	args.dump_fit.reset();
	REQUIRE(cli::cmd_forecast(args, out, err) == cli::kOk);
	CHECK(slurp(dir.file("b.csv")) == csv);
	CHECK(slurp(dir.file("b.svg")) == svg);

	// Flag overrides config.
	args.horizon = 170;
	args.bias_mode = "additive";
	args.out = dir.file("c.csv");
	args.plot.reset();
	REQUIRE(cli::cmd_forecast(args, out, err) == cli::kOk);
	rows = 0;
	for (char c : slurp(dir.file("c.csv")))
		rows += c == '\n';
	CHECK(rows == 1 + 3 * 170);

	args.target = "Risingl";
	std::ostringstream e2;
	CHECK(cli::cmd_forecast(args, out, e2) == cli::kUnknownTarget);
	CHECK(e2.str().find("Risingland") != std::string::npos);

	args.target = "Risingland";
	args.filters = dir.write("none.json", R"({"id": "n", "min_population": 1e12, "max_peak_day": 1, "min_cases_per_million": 0})");
	CHECK(cli::cmd_forecast(args, out, e2) == cli::kEmptyCohort);
}

TEST_CASE("cmd_forecast: converged target echoes the observed curve") {
	TempDir dir;
	const auto snap = dir.write("snap.csv", ingest::serialize_snapshot(small_snapshot()));
	cli::ForecastArgs args;
	args.snapshot = snap;
	args.target = "Country 0";
	args.filters = dir.write("loose.json", kLooseFilter);
	args.config = dir.write("cfg.json", kFastConfig);
	args.out = dir.file("f.csv");
	std::ostringstream out, err;
	REQUIRE(cli::cmd_forecast(args, out, err) == cli::kOk);
	CHECK(err.str().find("warning:") != std::string::npos);
	std::size_t rows = 0;
	for (char c : slurp(dir.file("f.csv")))
		rows += c == '\n';
	CHECK(rows == 1 + 2 * 110);
}

TEST_CASE("cmd_report: a minimal cohort is an exact fit") {
	// Four countries and three features plus an intercept: every target is interpolated exactly.
	std::vector<ingest::CountrySeries> countries;
	for (int i = 0; i < 4; ++i)
		countries.push_back(make_country("E" + std::to_string(i), 2'000'000 * (i + 1), 10.0 * ((i * 3) % 5 + 1),
		                                 tent(30 + 3 * i, 80, 600.0 + 70 * i, 20)));
	auto target = make_country("Target", 9'000'000, 33.0, tent(40, 0, 300, 0));
	target.start_date = testing::day(119 - 40); // still rising on the last snapshot day
	countries.push_back(target);
	TempDir dir;
	const auto snap = dir.write("snap.csv", ingest::serialize_snapshot(testing::make_snapshot(countries)));
	cli::ReportArgs args;
	args.snapshot = snap;
	args.filters = dir.write("loose.json", kLooseFilter);
	args.target = "Target";
	args.out = dir.file("r.csv");
	std::ostringstream out, err;
	REQUIRE(cli::cmd_report(args, out, err) == cli::kOk);
	const auto text = slurp(dir.file("r.csv"));
	CHECK(text == out.str());
	CHECK(text.rfind("filter_id,cohort_size,r2_peak_value,r2_peak_day,r2_total_cases,pred_peak_value,pred_peak_day,"
	                 "pred_total_cases\n",
	                 0) == 0);
	CHECK(text.find("\nloose,4,1,1,1,") != std::string::npos);

	std::ostringstream lower_out;
	args.target = "TARGET";
	args.out.reset();
	CHECK(cli::cmd_report(args, lower_out, err) == cli::kOk);
	CHECK(lower_out.str() == text);

	args.target = "Nowhere";
	CHECK(cli::cmd_report(args, out, err) == cli::kUnknownTarget);
}

TEST_CASE("run: argument parsing") {
	std::vector<std::string> words{"ssmcast", "forecast", "--snapshot", "x.csv"};
	std::vector<char *> argv;
	for (auto &w : words)
		argv.push_back(w.data());
	CHECK(cli::run(static_cast<int>(argv.size()), argv.data()) == cli::kFailure);
}
