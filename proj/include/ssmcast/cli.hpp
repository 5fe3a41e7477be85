#pragma once

#include "ssmcast/sarimax.hpp"
#include "ssmcast/ssm.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ssmcast::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kSchema = 2, kEmptyCohort = 3, kUnknownTarget = 4 };

struct PipelineConfig {
	int smoothing_window = ingest::kDefaultSmoothingWindow;
	sarimax::SarimaxSpec order{2, 1, 2, 1, 0, 1, 7, 0};
	bool order_search = false;
	std::vector<sarimax::SarimaxSpec> order_grid;
	int horizon = 400;
	ssm::BiasMode bias_mode = ssm::BiasMode::multiplicative;
	std::vector<std::string> filters{"1", "2", "3"};
	unsigned seed = 42;
	sarimax::FitOptions fit_options{};

	ssm::SsmOptions ssm_options() const;
};

// Overlays the keys present in a JSON config document onto `base`.
PipelineConfig apply_config_json(const PipelineConfig &base, const std::string &json_text);

// Explicit path first, then $SSM_CONFIG, then defaults.
PipelineConfig load_config(const std::optional<std::string> &path);

std::vector<std::string> split_list(const std::string &text);

// Case-insensitive near misses for an unknown country name.
std::vector<std::string> near_miss_names(const ingest::Snapshot &snapshot, const std::string &name,
                                         std::size_t limit = 5);

struct IngestArgs {
	std::string input;
	std::string out;
};

struct FilterArgs {
	std::string snapshot;
	std::string filter = "1";
	std::optional<std::string> out;
	std::optional<std::string> config;
};

struct ForecastArgs {
	std::string snapshot;
	std::string target;
	std::optional<std::string> filters;
	std::string out;
	std::optional<std::string> plot;
	std::optional<std::string> config;
	std::optional<std::string> dump_fit;
	std::optional<int> horizon;
	std::optional<std::string> bias_mode;
};

struct ReportArgs {
	std::string snapshot;
	std::optional<std::string> filters;
	std::string target;
	std::optional<std::string> out;
	std::optional<std::string> config;
};

int cmd_ingest(const IngestArgs &args, std::ostream &out, std::ostream &err);
int cmd_filter(const FilterArgs &args, std::ostream &out, std::ostream &err);
int cmd_forecast(const ForecastArgs &args, std::ostream &out, std::ostream &err);
int cmd_report(const ReportArgs &args, std::ostream &out, std::ostream &err);

// Full CLI entry point; used by the executable and by tests.
int run(int argc, char **argv);

} // namespace ssmcast::cli
