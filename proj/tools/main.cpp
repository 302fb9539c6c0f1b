#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hexsim/commands.hpp"
#include "hexsim/errors.hpp"

using namespace hexsim;

namespace {

struct Flags {
	std::string config;
	std::optional<std::string> scenario;
	std::optional<std::string> controller;
	std::optional<double> cf_mismatch;
	std::optional<double> controller_freq;
	std::optional<double> noise_scale;
	std::optional<double> duration;
	std::optional<bool> gust;
	std::optional<std::uint64_t> seed;
	std::optional<std::string> out;
	std::optional<int> repetitions;
};

void add_common(CLI::App *cmd, Flags &f)
{
	cmd->add_option("--config", f.config, "Sectioned key = value config file");
	cmd->add_option("--seed", f.seed, "Base random seed");
	cmd->add_option("--out", f.out, "Output directory");
	cmd->add_option("--repetitions", f.repetitions, "Runs per cell, seeds seed..seed+n-1");
}

void add_scenario(CLI::App *cmd, Flags &f)
{
	cmd->add_option("--scenario", f.scenario, "exp1 .. exp5");
	cmd->add_option("--controller", f.controller, "geo or indi");
	cmd->add_option("--cf-mismatch", f.cf_mismatch, "Controller c_f / nominal c_f");
	cmd->add_option("--controller-freq", f.controller_freq, "Controller rate in Hz");
	cmd->add_option("--noise-scale", f.noise_scale, "Injected noise variance factor");
	cmd->add_option("--duration", f.duration, "Scenario length in s");
	cmd->add_option("--gust", f.gust, "Enable the exp3 gust (true/false)");
}

RunConfig resolve(const Flags &f)
{
	RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
	if (f.scenario) {
		c.scenario = scenario_id_from_string(*f.scenario);
	}
	if (f.controller) {
		const auto kind = controller_kind_from_string(*f.controller);
		if (!kind) {
			throw ConfigError("unknown controller '" + *f.controller + "' (geo, indi)");
		}
		c.controller = *kind;
	}
	if (f.cf_mismatch) {
		c.overrides.model_mismatch_cf = *f.cf_mismatch;
	}
	if (f.controller_freq) {
		c.overrides.controller_freq = *f.controller_freq;
	}
	if (f.noise_scale) {
		c.overrides.noise_scale = *f.noise_scale;
	}
	if (f.duration) {
		c.overrides.duration = *f.duration;
	}
	if (f.gust) {
		c.overrides.gust = *f.gust;
	}
	if (f.seed) {
		c.seed = *f.seed;
	}
	if (f.out) {
		c.out_dir = *f.out;
	}
	if (f.repetitions) {
		c.repetitions = *f.repetitions;
	}
	return c;
}

} // namespace

int main(int argc, char **argv)
{
	CLI::App app{"Fixed-tilt hexarotor simulator with NDI and INDI pose control"};
	app.require_subcommand(1);

	Flags flags;
	std::string axis;

	CLI::App *run = app.add_subcommand("run", "Run one scenario and write log.csv and metrics.json");
	add_common(run, flags);
	add_scenario(run, flags);

	CLI::App *sweep = app.add_subcommand("sweep", "Sweep controller frequency or noise level for both controllers");
	sweep->add_option("--axis", axis, "frequency or noise")->required();
	add_common(sweep, flags);
	sweep->add_option("--cf-mismatch", flags.cf_mismatch, "Controller c_f / nominal c_f");

	CLI::App *validate = app.add_subcommand("validate", "Check geometry, allocation and hover trim of a config");
	validate->add_option("--config", flags.config, "Sectioned key = value config file");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError &e) {
		const int code = app.exit(e);
		return code == 0 ? kExitOk : kExitConfig;
	}

	RunConfig config;
	try {
		config = resolve(flags);
	} catch (const IoError &e) {
		std::cerr << "error: " << e.what() << "\n";
		return kExitIo;
	} catch (const Error &e) {
		std::cerr << "error: " << e.what() << "\n";
		return kExitConfig;
	}

	if (*run) {
		return cmd_run(config, std::cout, std::cerr);
	}
	if (*sweep) {
		try {
			return cmd_sweep(config, sweep_axis_from_string(axis), std::cout, std::cerr);
		} catch (const ConfigError &e) {
			std::cerr << "error: " << e.what() << "\n";
			return kExitConfig;
		}
	}
	return cmd_validate(config, std::cout, std::cerr);
}
