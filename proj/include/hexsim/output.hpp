#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hexsim/config.hpp"

namespace hexsim {

inline constexpr const char *kVersion = "1.0.0";

/// Fixed column order of log.csv.
const std::vector<std::string> &log_columns();

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

void write_log_csv(std::ostream &out, const RunLog &log);

nlohmann::json to_json(const RunMetrics &metrics);
nlohmann::json to_json(const Scenario &scenario);
/// The fully resolved config, defaults included.
nlohmann::json to_json(const RunConfig &config);

/// metrics.json body for one run (or pooled repetitions).
nlohmann::json metrics_document(const RunConfig &config, const Scenario &scenario, const RunMetrics &metrics,
				const std::vector<RunMetrics> &per_run = {});

struct SweepRow {
	std::string axis;  // "frequency" or "noise"
	double value{};
	ControllerKind controller{ControllerKind::indi};
	int repetitions{};
	bool ok{true};
	std::string error;  // set when !ok
	RunMetrics metrics;
};

void write_sweep_csv(std::ostream &out, const std::vector<SweepRow> &rows);

/// Writes `text` to `path` through a temporary file. Throws IoError.
void write_file(const std::filesystem::path &path, const std::string &text);

} // namespace hexsim
