#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "hexsim/experiments.hpp"

namespace hexsim {

/// Everything a CLI invocation needs. Defaults reproduce the built-in
/// vehicle and experiment settings.
struct RunConfig {
	SimSettings settings;
	ScenarioId scenario{ScenarioId::exp1};
	ControllerKind controller{ControllerKind::indi};
	ScenarioOverrides overrides;
	std::filesystem::path out_dir{"out"};
	std::uint64_t seed{1};
	int repetitions{1};

	/// Throws ConfigError.
	void validate() const;
	/// The scenario this config selects, with the seed applied.
	Scenario build() const;
	Scenario build(ControllerKind kind) const;
};

/// Parses sectioned `key = value` text:
///
///     # comment
///     [platform]
///     mass = 2.95
///     inertia = 0.08 0.08 0.14
///
/// Vector keys take one value (broadcast) or three. Unknown sections and
/// keys are rejected. Errors carry the offending line number.
RunConfig parse_config(std::string_view text);

/// Reads and parses a config file. Throws IoError if it cannot be read.
RunConfig load_config(const std::filesystem::path &path);

/// Config text that parses back to `config`.
std::string format_config(const RunConfig &config);

} // namespace hexsim
