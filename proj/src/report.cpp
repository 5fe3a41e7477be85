#include "ssmcast/report.hpp"

#include "ssmcast/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace ssmcast::report {

using csv::format_sig6;

std::string forecast_csv(std::span<const ssm::Forecast> per_filter, const ssm::Forecast &average) {
	std::ostringstream out;
	out << "day_index,date,filter_id,predicted_new_cases\n";
	auto block = [&](const ssm::Forecast &f) {
		for (std::size_t t = 0; t < f.daily_predicted.size(); ++t) {
			out << t << ',' << format_iso_date(f.start_date + std::chrono::days(static_cast<long>(t))) << ','
			    << csv::escape_field(f.filter_id) << ',' << format_sig6(f.daily_predicted[t]) << '\n';
		}
	};
	for (const auto &f : per_filter)
		block(f);
	block(average);
	return out.str();
}

namespace {

std::string xml_escape(const std::string &text) {
	std::string out;
	for (char c : text) {
		switch (c) {
		case '&': out += "&amp;"; break;
		case '<': out += "&lt;"; break;
		case '>': out += "&gt;"; break;
		case '"': out += "&quot;"; break;
		default: out += c;
		}
	}
	return out;
}

nlohmann::ordered_json summary(const ssm::Forecast &f) {
	nlohmann::ordered_json j;
	j["filter_id"] = f.filter_id;
	j["peak_day"] = f.peak_day;
	j["peak_date"] = format_iso_date(f.start_date + std::chrono::days(f.peak_day));
	j["peak_value"] = f.peak_value;
	j["total_cases"] = f.total_cases;
	j["bias"] = f.bias;
	if (f.r_squared)
		j["r_squared"] = *f.r_squared;
	else
		j["r_squared"] = nullptr;
	return j;
}

} // namespace

std::string forecast_summary_json(std::span<const ssm::Forecast> per_filter, const ssm::Forecast &average) {
	nlohmann::ordered_json j;
	j["target"] = average.target_country;
	j["per_filter"] = nlohmann::ordered_json::array();
	for (const auto &f : per_filter)
		j["per_filter"].push_back(summary(f));
	j["average"] = summary(average);
	return j.dump(2) + "\n";
}

std::string forecast_svg(std::span<const ssm::Forecast> per_filter, const ssm::Forecast &average) {
	constexpr double W = 900, H = 520, left = 90, right = 170, top = 40, bottom = 70;
	const double plot_w = W - left - right, plot_h = H - top - bottom;
	std::vector<const ssm::Forecast *> series;
	for (const auto &f : per_filter)
		series.push_back(&f);
	series.push_back(&average);

	std::size_t max_len = 1;
	double max_y = 1.0;
	for (const auto *f : series) {
		max_len = std::max(max_len, f->daily_predicted.size());
		for (double v : f->daily_predicted)
			max_y = std::max(max_y, v);
	}
	max_y *= 1.05;
	const double x_span = static_cast<double>(std::max<std::size_t>(max_len - 1, 1));
	auto px = [&](double t) { return left + plot_w * t / x_span; };
	auto py = [&](double v) { return top + plot_h * (1.0 - v / max_y); };
	auto num = [](double v) {
		char buf[32];
		std::snprintf(buf, sizeof buf, "%.2f", v);
		return std::string(buf);
	};

	static const char *colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"};
	std::ostringstream out;
	out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
	    << ' ' << H << "\">\n";
	out << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
	out << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
	    << "font-size=\"16\">" << xml_escape(average.target_country) << ": predicted new cases per day</text>\n";
	out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + plot_h) << "\" x2=\"" << num(left + plot_w)
	    << "\" y2=\"" << num(top + plot_h) << "\" stroke=\"black\"/>\n";
	out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\""
	    << num(top + plot_h) << "\" stroke=\"black\"/>\n";
	for (int i = 0; i <= 5; ++i) {
		const double t = x_span * i / 5.0;
		const double v = max_y * i / 5.0;
		out << "<text x=\"" << num(px(t)) << "\" y=\"" << num(top + plot_h + 18)
		    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << std::lround(t)
		    << "</text>\n";
		out << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(v) + 4)
		    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << format_sig6(std::round(v))
		    << "</text>\n";
	}
	out << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(H - 20)
	    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">days since first reported case"
	    << "</text>\n";
	out << "<text x=\"20\" y=\"" << num(top + plot_h / 2) << "\" transform=\"rotate(-90 20 " << num(top + plot_h / 2)
	    << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">cases/day</text>\n";

	for (std::size_t k = 0; k < series.size(); ++k) {
		const auto &f = *series[k];
		const bool is_avg = k + 1 == series.size();
		const char *color = is_avg ? "black" : colors[k % std::size(colors)];
		out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << (is_avg ? 2.5 : 1.5)
		    << "\" points=\"";
		for (std::size_t t = 0; t < f.daily_predicted.size(); ++t)
			out << (t ? " " : "") << num(px(static_cast<double>(t))) << ',' << num(py(f.daily_predicted[t]));
		out << "\"/>\n";
		const double ly = top + 20.0 * static_cast<double>(k);
		out << "<line x1=\"" << num(W - right + 15) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(W - right + 40)
		    << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
		out << "<text x=\"" << num(W - right + 46) << "\" y=\"" << num(ly + 4)
		    << "\" font-family=\"sans-serif\" font-size=\"12\">"
		    << (is_avg ? std::string("average") : xml_escape("filter " + f.filter_id)) << "</text>\n";
	}
	out << "</svg>\n";
	return out.str();
}

std::string cohort_csv(const filters::Cohort &cohort) {
	std::ostringstream out;
	out << "country,population,cases_per_million,population_density,peak_day,peak_value,rising_mean,falling_mean,"
	       "ratio\n";
	for (const auto &m : cohort) {
		out << csv::escape_field(m.country.name) << ',' << m.country.population << ','
		    << format_sig6(m.country.cases_per_million()) << ',' << format_sig6(m.country.population_density) << ','
		    << m.peak.peak_day << ',' << format_sig6(m.peak.peak_value) << ',' << format_sig6(m.peak.rising_mean)
		    << ',' << format_sig6(m.peak.falling_mean) << ',' << (m.peak.ratio ? format_sig6(*m.peak.ratio) : "")
		    << '\n';
	}
	return out.str();
}

std::string report_csv(std::span<const ReportRow> rows) {
	std::ostringstream out;
	out << "filter_id,cohort_size,r2_peak_value,r2_peak_day,r2_total_cases,pred_peak_value,pred_peak_day,"
	       "pred_total_cases\n";
	for (const auto &r : rows) {
		out << csv::escape_field(r.filter_id) << ',' << r.cohort_size << ',' << format_sig6(r.r2_peak_value) << ','
		    << format_sig6(r.r2_peak_day) << ',' << format_sig6(r.r2_total_cases) << ','
		    << format_sig6(r.prediction.peak_value) << ',' << r.prediction.peak_day << ','
		    << format_sig6(r.prediction.total_cases) << '\n';
	}
	return out.str();
}

} // namespace ssmcast::report
