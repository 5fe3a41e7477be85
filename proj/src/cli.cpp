#include "ssmcast/cli.hpp"

#include "ssmcast/csv.hpp"
#include "ssmcast/error.hpp"
#include "ssmcast/filters.hpp"
#include "ssmcast/ingest.hpp"
#include "ssmcast/regression.hpp"
#include "ssmcast/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

namespace ssmcast::cli {

namespace {

std::string read_file(const std::string &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw ParameterError("cannot open '" + path + "'");
	std::stringstream buf;
	buf << in.rdbuf();
	return buf.str();
}

void write_file(const std::string &path, const std::string &content) {
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out)
		throw ParameterError("cannot write '" + path + "'");
	out << content;
}

int exit_code_for(const std::exception &e) {
	if (dynamic_cast<const EmptyCohortError *>(&e))
		return kEmptyCohort;
	if (dynamic_cast<const UnknownTargetError *>(&e))
		return kUnknownTarget;
	if (dynamic_cast<const SchemaError *>(&e))
		return kSchema;
	return kFailure;
}

int report_error(const std::exception &e, std::ostream &err) {
	err << "error: " << e.what() << '\n';
	return exit_code_for(e);
}

std::string lower(std::string s) {
	std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
	return s;
}

std::size_t edit_distance(const std::string &a, const std::string &b) {
	std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
	for (std::size_t j = 0; j <= b.size(); ++j)
		prev[j] = j;
	for (std::size_t i = 1; i <= a.size(); ++i) {
		cur[0] = i;
		for (std::size_t j = 1; j <= b.size(); ++j)
			cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
		std::swap(prev, cur);
	}
	return prev[b.size()];
}

sarimax::SarimaxSpec spec_from(const nlohmann::json &order, const nlohmann::json &seasonal) {
	sarimax::SarimaxSpec s;
	const auto o = order.get<std::vector<int>>();
	if (o.size() != 3)
		throw SchemaError("config: order must be [p, d, q]");
	s.p = o[0];
	s.d = o[1];
	s.q = o[2];
	if (!seasonal.is_null()) {
		const auto so = seasonal.get<std::vector<int>>();
		if (so.size() != 4)
			throw SchemaError("config: seasonal_order must be [P, D, Q, s]");
		s.P = so[0];
		s.D = so[1];
		s.Q = so[2];
		s.s = so[3];
	}
	sarimax::validate(s);
	return s;
}

ingest::Snapshot load_snapshot(const std::string &path) { return ingest::parse_snapshot(read_file(path)); }

// Common alternative spellings of snapshot country names.
const std::vector<std::vector<std::string>> kAliases = {
    {"usa", "us", "united states", "united states of america"},
    {"uk", "united kingdom", "great britain"},
    {"south korea", "korea, south", "s. korea", "republic of korea"},
    {"uae", "united arab emirates"},
    {"czechia", "czech republic"},
};

const ingest::CountrySeries &find_target(const ingest::Snapshot &snapshot, const std::string &name) {
	if (const auto *c = snapshot.find(name))
		return *c;
	const auto key = lower(name);
	std::vector<std::string> accepted{key};
	for (const auto &group : kAliases)
		if (std::find(group.begin(), group.end(), key) != group.end())
			accepted = group;
	for (const auto &[country, series] : snapshot.countries())
		if (std::find(accepted.begin(), accepted.end(), lower(country)) != accepted.end())
			return series;
	std::string msg = "unknown target country '" + name + "'";
	const auto near = near_miss_names(snapshot, name);
	if (!near.empty()) {
		msg += "; did you mean:";
		for (const auto &n : near)
			msg += " '" + n + "'";
	}
	throw UnknownTargetError(msg);
}

std::string json_path_for(const std::string &csv_path) {
	std::filesystem::path p(csv_path);
	p.replace_extension(".json");
	return p.string();
}

struct FilterOutcome {
	std::optional<ssm::Forecast> forecast;
	std::size_t cohort_size = 0;
	std::string error;
	int code = kOk;
};

FilterOutcome forecast_one(const ingest::Snapshot &snapshot, const ingest::CountrySeries &target,
                           const std::string &filter_ref, const PipelineConfig &config) {
	FilterOutcome outcome;
	try {
		const auto spec = filters::resolve_filter(filter_ref);
		const auto cohort = filters::apply_filter(snapshot, spec, config.smoothing_window);
		outcome.cohort_size = cohort.size();
		const auto models = regression::fit_peak_models(cohort);
		const auto options = config.ssm_options();
		auto order = config.order;
		if (config.order_search && !config.order_grid.empty()) {
			const auto cal = ssm::calibrate(cohort, spec.id);
			const auto pred = regression::predict_targets(models, target);
			const auto curve = ssm::synthesize_curve(target, pred, cal, options);
			order = sarimax::select_order(curve.values, config.order_grid, config.fit_options);
		}
		outcome.forecast = ssm::run_ssm(target, cohort, models, order, spec.id, options);
	} catch (const std::exception &e) {
		outcome.error = "filter " + filter_ref + ": " + e.what();
		outcome.code = exit_code_for(e);
	}
	return outcome;
}

} // namespace

ssm::SsmOptions PipelineConfig::ssm_options() const {
	ssm::SsmOptions o;
	o.horizon = horizon;
	o.smoothing_window = smoothing_window;
	o.bias_mode = bias_mode;
	o.fit_options = fit_options;
	return o;
}

PipelineConfig apply_config_json(const PipelineConfig &base, const std::string &json_text) {
	PipelineConfig cfg = base;
	nlohmann::json doc;
	try {
		doc = nlohmann::json::parse(json_text);
	} catch (const nlohmann::json::exception &e) {
		throw SchemaError(std::string("config: ") + e.what());
	}
	if (!doc.is_object())
		throw SchemaError("config: top level must be an object");
	try {
		for (const auto &[key, value] : doc.items()) {
			if (key == "smoothing_window") {
				cfg.smoothing_window = value.get<int>();
			} else if (key == "order") {
				const auto seasonal = doc.contains("seasonal_order") ? doc["seasonal_order"] : nlohmann::json();
				cfg.order = spec_from(value, seasonal);
			} else if (key == "seasonal_order") {
				if (!doc.contains("order"))
					cfg.order = spec_from(nlohmann::json::array({cfg.order.p, cfg.order.d, cfg.order.q}), value);
			} else if (key == "order_search") {
				cfg.order_search = value.get<bool>();
			} else if (key == "order_grid") {
				cfg.order_grid.clear();
				for (const auto &entry : value) {
					const auto v = entry.get<std::vector<int>>();
					if (v.size() != 7)
						throw SchemaError("config: order_grid entries must be [p, d, q, P, D, Q, s]");
					cfg.order_grid.push_back(spec_from(nlohmann::json::array({v[0], v[1], v[2]}),
					                                   nlohmann::json::array({v[3], v[4], v[5], v[6]})));
				}
			} else if (key == "horizon") {
				cfg.horizon = value.get<int>();
			} else if (key == "bias_mode") {
				cfg.bias_mode = ssm::parse_bias_mode(value.get<std::string>());
			} else if (key == "filters") {
				cfg.filters.clear();
				for (const auto &f : value)
					cfg.filters.push_back(f.is_string() ? f.get<std::string>() : f.dump());
			} else if (key == "seed") {
				cfg.seed = value.get<unsigned>();
			} else if (key == "max_iterations") {
				cfg.fit_options.max_iterations = value.get<int>();
			} else if (key == "tolerance") {
				cfg.fit_options.tolerance = value.get<double>();
			} else if (key == "restarts") {
				cfg.fit_options.restarts = value.get<int>();
			} else {
				throw SchemaError("config: unknown key '" + key + "'");
			}
		}
	} catch (const nlohmann::json::exception &e) {
		throw SchemaError(std::string("config: ") + e.what());
	}
	if (cfg.smoothing_window < 1 || cfg.smoothing_window % 2 == 0)
		throw ParameterError("config: smoothing_window must be odd and >= 1");
	if (cfg.horizon < 2)
		throw ParameterError("config: horizon must be at least 2");
	return cfg;
}

PipelineConfig load_config(const std::optional<std::string> &path) {
	if (path)
		return apply_config_json({}, read_file(*path));
	if (const char *env = std::getenv("SSM_CONFIG"); env && *env)
		return apply_config_json({}, read_file(env));
	return {};
}

std::vector<std::string> split_list(const std::string &text) {
	std::vector<std::string> out;
	std::stringstream ss(text);
	std::string item;
	while (std::getline(ss, item, ',')) {
		const auto b = item.find_first_not_of(" \t");
		const auto e = item.find_last_not_of(" \t");
		if (b != std::string::npos)
			out.push_back(item.substr(b, e - b + 1));
	}
	return out;
}

std::vector<std::string> near_miss_names(const ingest::Snapshot &snapshot, const std::string &name, std::size_t limit) {
	const auto key = lower(name);
	std::vector<std::pair<std::size_t, std::string>> scored;
	for (const auto &[country, _] : snapshot.countries()) {
		const auto lc = lower(country);
		const std::size_t dist = edit_distance(key, lc);
		const bool contains = !key.empty() && (lc.find(key) != std::string::npos || key.find(lc) != std::string::npos);
		if (contains || dist <= std::max<std::size_t>(2, key.size() / 3))
			scored.emplace_back(dist, country);
	}
	std::sort(scored.begin(), scored.end());
	std::vector<std::string> out;
	for (std::size_t i = 0; i < scored.size() && i < limit; ++i)
		out.push_back(scored[i].second);
	return out;
}

int cmd_ingest(const IngestArgs &args, std::ostream &out, std::ostream &err) {
	try {
		const auto snapshot = ingest::parse_snapshot(read_file(args.input));
		const auto canonical = ingest::serialize_snapshot(snapshot);
		write_file(args.out, canonical);
		std::size_t rows = 0;
		for (const auto &[_, c] : snapshot.countries())
			rows += c.size();
		out << "ingested " << rows << " rows for " << snapshot.size() << " countries (as of "
		    << format_iso_date(snapshot.as_of_date()) << ")\n";
		return kOk;
	} catch (const std::exception &e) {
		return report_error(e, err);
	}
}

int cmd_filter(const FilterArgs &args, std::ostream &out, std::ostream &err) {
	try {
		const auto config = load_config(args.config);
		const auto snapshot = load_snapshot(args.snapshot);
		const auto spec = filters::resolve_filter(args.filter);
		const auto cohort = filters::apply_filter(snapshot, spec, config.smoothing_window);
		const auto table = report::cohort_csv(cohort);
		out << table;
		if (args.out)
			write_file(*args.out, table);
		err << "filter " << spec.id << ": " << cohort.size() << " countries\n";
		return kOk;
	} catch (const std::exception &e) {
		return report_error(e, err);
	}
}

int cmd_forecast(const ForecastArgs &args, std::ostream &out, std::ostream &err) {
	try {
		auto config = load_config(args.config);
		if (args.filters)
			config.filters = split_list(*args.filters);
		if (args.horizon)
			config.horizon = *args.horizon;
		if (args.bias_mode)
			config.bias_mode = ssm::parse_bias_mode(*args.bias_mode);
		if (config.filters.empty())
			throw ParameterError("no filters requested");

		const auto snapshot = load_snapshot(args.snapshot);
		const auto &target = find_target(snapshot, args.target);

		std::vector<std::future<FilterOutcome>> pending;
		for (const auto &f : config.filters)
			pending.push_back(std::async(std::launch::async, forecast_one, std::cref(snapshot), std::cref(target),
			                             f, std::cref(config)));
		std::vector<ssm::Forecast> forecasts;
		int failure = kOk;
		for (std::size_t i = 0; i < pending.size(); ++i) {
			auto outcome = pending[i].get();
			if (!outcome.forecast) {
				err << "error: " << outcome.error << '\n';
				if (failure == kOk)
					failure = outcome.code;
				continue;
			}
			for (const auto &w : outcome.forecast->warnings)
				err << "warning: " << w << '\n';
			const auto &fc = *outcome.forecast;
			out << "filter " << fc.filter_id << ": cohort " << outcome.cohort_size << ", R2 "
			    << csv::format_sig6(fc.r_squared.value_or(0.0)) << ", peak " << csv::format_sig6(fc.peak_value)
			    << " cases/day on day " << fc.peak_day << " ("
			    << format_iso_date(fc.start_date + std::chrono::days(fc.peak_day)) << "), total "
			    << csv::format_sig6(fc.total_cases) << '\n';
			forecasts.push_back(std::move(*outcome.forecast));
		}
		if (forecasts.empty())
			return failure == kOk ? kFailure : failure;

		// Converged short-circuit curves may differ in length from SSM curves; only average like with like.
		std::vector<ssm::Forecast> same_length;
		for (const auto &f : forecasts)
			if (f.daily_predicted.size() == forecasts.front().daily_predicted.size())
				same_length.push_back(f);
		const auto average = ssm::average_forecasts(same_length);
		out << "average: peak " << csv::format_sig6(average.peak_value) << " cases/day on day " << average.peak_day
		    << " (" << format_iso_date(average.start_date + std::chrono::days(average.peak_day)) << "), total "
		    << csv::format_sig6(average.total_cases) << '\n';

		write_file(args.out, report::forecast_csv(forecasts, average));
		write_file(json_path_for(args.out), report::forecast_summary_json(forecasts, average));
		if (args.plot)
			write_file(*args.plot, report::forecast_svg(forecasts, average));
		if (args.dump_fit) {
			nlohmann::ordered_json dump = nlohmann::ordered_json::array();
			for (const auto &f : forecasts) {
				nlohmann::ordered_json entry;
				entry["filter_id"] = f.filter_id;
				entry["fit"] = f.fit ? nlohmann::ordered_json::parse(sarimax::fit_to_json(*f.fit)) : nullptr;
				dump.push_back(entry);
			}
			write_file(*args.dump_fit, dump.dump(2) + "\n");
		}
		return failure;
	} catch (const std::exception &e) {
		return report_error(e, err);
	}
}

int cmd_report(const ReportArgs &args, std::ostream &out, std::ostream &err) {
	try {
		auto config = load_config(args.config);
		if (args.filters)
			config.filters = split_list(*args.filters);
		const auto snapshot = load_snapshot(args.snapshot);
		const auto &target = find_target(snapshot, args.target);
		std::vector<report::ReportRow> rows;
		for (const auto &ref : config.filters) {
			const auto spec = filters::resolve_filter(ref);
			const auto cohort = filters::apply_filter(snapshot, spec, config.smoothing_window);
			const auto models = regression::fit_peak_models(cohort);
			report::ReportRow row;
			row.filter_id = spec.id;
			row.cohort_size = cohort.size();
			row.r2_peak_value = models.model_peak_value.r_squared;
			row.r2_peak_day = models.model_peak_day.r_squared;
			row.r2_total_cases = models.model_total_cases.r_squared;
			row.prediction = regression::predict_targets(models, target);
			rows.push_back(row);
		}
		const auto table = report::report_csv(rows);
		out << table;
		if (args.out)
			write_file(*args.out, table);
		return kOk;
	} catch (const std::exception &e) {
		return report_error(e, err);
	}
}

int run(int argc, char **argv) {
	CLI::App app{"Epidemic peak regression and SARIMAX-smoothed case forecasts"};
	app.require_subcommand(1);

	IngestArgs ingest_args;
	auto *ingest = app.add_subcommand("ingest", "Parse, repair and canonicalise a case snapshot CSV");
	ingest->add_option("--input", ingest_args.input, "raw CSV")->required();
	ingest->add_option("--out", ingest_args.out, "canonical CSV to write")->required();

	FilterArgs filter_args;
	std::string filter_out, filter_config;
	auto *filter = app.add_subcommand("filter", "List the training cohort selected by a filter");
	filter->add_option("--snapshot", filter_args.snapshot)->required();
	filter->add_option("--filter", filter_args.filter, "1, 2, 3 or a filter JSON file")->required();
	auto *filter_out_opt = filter->add_option("--out", filter_out, "also write the cohort CSV here");
	auto *filter_cfg_opt = filter->add_option("--config", filter_config);

	ForecastArgs fc;
	std::string fc_filters, fc_plot, fc_config, fc_dump, fc_bias;
	int fc_horizon = 0;
	auto *forecast = app.add_subcommand("forecast", "Per-filter and averaged forecasts for a target country");
	forecast->add_option("--snapshot", fc.snapshot)->required();
	forecast->add_option("--target", fc.target)->required();
	auto *fc_filters_opt = forecast->add_option("--filters", fc_filters, "comma-separated filter ids or JSON paths");
	forecast->add_option("--out", fc.out, "forecast CSV; a JSON summary is written next to it")->required();
	auto *fc_plot_opt = forecast->add_option("--plot", fc_plot, "SVG chart");
	auto *fc_config_opt = forecast->add_option("--config", fc_config);
	auto *fc_dump_opt = forecast->add_option("--dump-fit", fc_dump, "JSON dump of fitted SARIMAX parameters");
	auto *fc_horizon_opt = forecast->add_option("--horizon", fc_horizon);
	auto *fc_bias_opt = forecast->add_option("--bias-mode", fc_bias, "multiplicative or additive");

	ReportArgs rep;
	std::string rep_filters, rep_out, rep_config;
	auto *report = app.add_subcommand("report", "Regression summary per filter for a target country");
	report->add_option("--snapshot", rep.snapshot)->required();
	auto *rep_filters_opt = report->add_option("--filters", rep_filters);
	report->add_option("--target", rep.target)->required();
	auto *rep_out_opt = report->add_option("--out", rep_out);
	auto *rep_cfg_opt = report->add_option("--config", rep_config);

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		return app.exit(e) == 0 ? kOk : kFailure;
	}

	auto opt = [](CLI::Option *o, const std::string &v) { return o->count() ? std::optional<std::string>(v) : std::nullopt; };
	if (ingest->parsed())
		return cmd_ingest(ingest_args, std::cout, std::cerr);
	if (filter->parsed()) {
		filter_args.out = opt(filter_out_opt, filter_out);
		filter_args.config = opt(filter_cfg_opt, filter_config);
		return cmd_filter(filter_args, std::cout, std::cerr);
	}
	if (forecast->parsed()) {
		fc.filters = opt(fc_filters_opt, fc_filters);
		fc.plot = opt(fc_plot_opt, fc_plot);
		fc.config = opt(fc_config_opt, fc_config);
		fc.dump_fit = opt(fc_dump_opt, fc_dump);
		fc.bias_mode = opt(fc_bias_opt, fc_bias);
		if (fc_horizon_opt->count())
			fc.horizon = fc_horizon;
		return cmd_forecast(fc, std::cout, std::cerr);
	}
	rep.filters = opt(rep_filters_opt, rep_filters);
	rep.out = opt(rep_out_opt, rep_out);
	rep.config = opt(rep_cfg_opt, rep_config);
	return cmd_report(rep, std::cout, std::cerr);
}

} // namespace ssmcast::cli
