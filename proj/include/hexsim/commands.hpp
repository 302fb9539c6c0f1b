#pragma once

#include <ostream>
#include <string_view>
#include <vector>

#include "hexsim/config.hpp"
#include "hexsim/output.hpp"

namespace hexsim {

enum ExitCode : int {
	kExitOk = 0,
	kExitConfig = 2,
	kExitDivergence = 3,
	kExitIo = 4,
};

enum class SweepAxis { frequency, noise };

/// Throws ConfigError for anything but "frequency" or "noise".
SweepAxis sweep_axis_from_string(std::string_view name);

/// Runs the configured scenario (pooled over `repetitions` seeds) and
/// writes <out>/log.csv for the first seed and <out>/metrics.json.
int cmd_run(const RunConfig &config, std::ostream &out, std::ostream &err);

/// Grid of both controllers over the axis values. Frequency cells use
/// exp4, noise cells exp5. A failing cell is flagged and the sweep goes on.
std::vector<SweepRow> run_sweep(const RunConfig &config, SweepAxis axis);

/// run_sweep plus <out>/sweep.csv. Returns kExitDivergence if any cell failed.
int cmd_sweep(const RunConfig &config, SweepAxis axis, std::ostream &out, std::ostream &err);

struct ValidationReport {
	bool geometry_ok{false};
	std::string geometry_error;
	int rank{};
	double condition_number{};
	RotorVec trim_u{RotorVec::Zero()};
	RotorVec trim_w{RotorVec::Zero()};  // sqrt(|u|), rad/s
	bool trim_within_limits{false};
	std::vector<std::string> violations;
};

ValidationReport validate_platform(const PlatformParams &params);

/// Prints the report. Exit 0 when the geometry is full rank and the hover
/// trim fits the rotor limits, 2 otherwise.
int cmd_validate(const RunConfig &config, std::ostream &out, std::ostream &err);

} // namespace hexsim
