#include "hexsim/commands.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <iomanip>
#include <sstream>
#include <thread>

#include <Eigen/SVD>

#include "hexsim/errors.hpp"

namespace hexsim {

SweepAxis sweep_axis_from_string(std::string_view name)
{
	if (name == "frequency") {
		return SweepAxis::frequency;
	}
	if (name == "noise") {
		return SweepAxis::noise;
	}
	throw ConfigError("unknown sweep axis '" + std::string(name) + "' (frequency, noise)");
}

int cmd_run(const RunConfig &config, std::ostream &out, std::ostream &err)
{
	try {
		config.validate();
		const Scenario scenario = config.build();
		const AggregateResult agg = repeat_runs(scenario, config.settings, config.repetitions, config.seed, true);

		std::ostringstream csv;
		write_log_csv(csv, agg.logs.front());
		write_file(config.out_dir / "log.csv", csv.str());
		const auto doc = metrics_document(config, scenario, agg.pooled, agg.per_run);
		write_file(config.out_dir / "metrics.json", doc.dump(2) + "\n");

		out << to_string(scenario.id) << " " << to_string(scenario.controller) << " seed " << config.seed << " x"
		    << config.repetitions << ": lon att " << agg.pooled.lon_att_mean_deg << " +- "
		    << agg.pooled.lon_att_std_deg << " deg, pos " << agg.pooled.pos_norm_mean << " +- "
		    << agg.pooled.pos_norm_std << " m\n";
		out << "wrote " << (config.out_dir / "log.csv").string() << " and " << (config.out_dir / "metrics.json").string()
		    << "\n";
		return kExitOk;
	} catch (const NonFiniteState &e) {
		err << "error: " << e.what() << "\n";
		return kExitDivergence;
	} catch (const IoError &e) {
		err << "error: " << e.what() << "\n";
		return kExitIo;
	} catch (const Error &e) {
		err << "error: " << e.what() << "\n";
		return kExitConfig;
	}
}

std::vector<SweepRow> run_sweep(const RunConfig &config, SweepAxis axis)
{
	config.validate();

	struct Cell {
		double value;
		ControllerKind kind;
	};
	std::vector<Cell> cells;
	if (axis == SweepAxis::frequency) {
		for (double f : kControllerFrequencies) {
			for (ControllerKind k : {ControllerKind::indi, ControllerKind::geo}) {
				cells.push_back({f, k});
			}
		}
	} else {
		for (double n : kNoiseScales) {
			for (ControllerKind k : {ControllerKind::indi, ControllerKind::geo}) {
				cells.push_back({n, k});
			}
		}
	}

	auto run_cell = [&config, axis](const Cell &cell) {
		SweepRow row;
		row.axis = axis == SweepAxis::frequency ? "frequency" : "noise";
		row.value = cell.value;
		row.controller = cell.kind;
		row.repetitions = config.repetitions;
		try {
			ScenarioOverrides o = config.overrides;
			o.seed = config.seed;
			if (axis == SweepAxis::frequency) {
				o.controller_freq = cell.value;
			} else {
				o.noise_scale = cell.value;
			}
			const ScenarioId id = axis == SweepAxis::frequency ? ScenarioId::exp4 : ScenarioId::exp5;
			const Scenario s = build_scenario(id, cell.kind, o);
			row.metrics = repeat_runs(s, config.settings, config.repetitions, config.seed).pooled;
		} catch (const Error &e) {
			row.ok = false;
			row.error = e.what();
		}
		return row;
	};

	std::vector<SweepRow> rows(cells.size());
	const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
	for (std::size_t begin = 0; begin < cells.size(); begin += workers) {
		const std::size_t end = std::min(cells.size(), begin + workers);
		std::vector<std::future<SweepRow>> batch;
		for (std::size_t i = begin; i < end; ++i) {
			batch.push_back(std::async(std::launch::async, run_cell, cells[i]));
		}
		for (std::size_t i = begin; i < end; ++i) {
			rows[i] = batch[i - begin].get();
		}
	}
	return rows;
}

int cmd_sweep(const RunConfig &config, SweepAxis axis, std::ostream &out, std::ostream &err)
{
	std::vector<SweepRow> rows;
	try {
		rows = run_sweep(config, axis);
		std::ostringstream csv;
		write_sweep_csv(csv, rows);
		write_file(config.out_dir / "sweep.csv", csv.str());
	} catch (const IoError &e) {
		err << "error: " << e.what() << "\n";
		return kExitIo;
	} catch (const Error &e) {
		err << "error: " << e.what() << "\n";
		return kExitConfig;
	}

	bool all_ok = true;
	out << std::left << std::setw(8) << (axis == SweepAxis::frequency ? "Hz" : "noise") << std::setw(6) << "ctrl"
	    << "lon att [deg]        pos [m]\n";
	for (const SweepRow &r : rows) {
		out << std::left << std::setw(8) << r.value << std::setw(6) << to_string(r.controller);
		if (r.ok) {
			std::ostringstream a, p;
			a << std::fixed << std::setprecision(4) << r.metrics.lon_att_mean_deg << " +- " << r.metrics.lon_att_std_deg;
			p << std::fixed << std::setprecision(5) << r.metrics.pos_norm_mean << " +- " << r.metrics.pos_norm_std;
			out << std::setw(21) << a.str() << p.str() << "\n";
		} else {
			all_ok = false;
			out << "FAILED: " << r.error << "\n";
		}
	}
	out << "wrote " << (config.out_dir / "sweep.csv").string() << "\n";
	return all_ok ? kExitOk : kExitDivergence;
}

ValidationReport validate_platform(const PlatformParams &params)
{
	ValidationReport report;
	params.validate();

	EffectivenessMatrices eff;
	try {
		eff = build_effectiveness(params);
	} catch (const DegenerateGeometry &e) {
		report.geometry_error = e.what();
		Mat6 stacked;
		for (std::size_t i = 0; i < kRotorCount; ++i) {
			const RotationMatrix r = rotor_to_body(params, i);
			const Vec3 thrust = r * (params.c_f * e3());
			stacked.block<3, 1>(0, static_cast<Eigen::Index>(i)) = thrust;
			stacked.block<3, 1>(3, static_cast<Eigen::Index>(i))
				= (params.rotor_positions[i] - params.com_offset).cross(thrust)
				  + r * (params.spin_dirs[i] * params.c_tau * e3());
		}
		Eigen::JacobiSVD<Mat6> svd(stacked);
		svd.setThreshold(1e-9);
		report.rank = static_cast<int>(svd.rank());
		report.violations.push_back("effectiveness matrix is rank deficient");
		return report;
	}

	report.geometry_ok = true;
	report.rank = 6;
	report.condition_number = eff.condition_number;
	report.trim_u = hover_trim(params, eff);
	report.trim_w = report.trim_u.cwiseAbs().cwiseSqrt();
	const double u_min = params.w_min * params.w_min;
	const double u_max = params.w_max * params.w_max;
	for (Eigen::Index i = 0; i < 6; ++i) {
		const double u = report.trim_u(i);
		std::ostringstream msg;
		if (u > u_max) {
			msg << "rotor " << i + 1 << " trim " << report.trim_w(i) << " rad/s exceeds w_max " << params.w_max;
		} else if (u < u_min) {
			msg << "rotor " << i + 1 << " trim " << (u < 0.0 ? "-" : "") << report.trim_w(i)
			    << " rad/s below w_min " << params.w_min;
		} else {
			continue;
		}
		report.violations.push_back(msg.str());
	}
	report.trim_within_limits = report.violations.empty();
	return report;
}

int cmd_validate(const RunConfig &config, std::ostream &out, std::ostream &err)
{
	ValidationReport report;
	try {
		config.settings.gains.validate();
		report = validate_platform(config.settings.nominal);
	} catch (const Error &e) {
		err << "error: " << e.what() << "\n";
		return kExitConfig;
	}

	out << "rank: " << report.rank << "\n";
	if (!report.geometry_ok) {
		out << "geometry: DegenerateGeometry: " << report.geometry_error << "\n";
		return kExitConfig;
	}
	out << "condition number: " << report.condition_number << "\n";
	out << "hover trim [rad/s]:";
	for (Eigen::Index i = 0; i < 6; ++i) {
		out << " " << report.trim_w(i);
	}
	out << "\n";
	out << "rotor limits [rad/s]: [" << config.settings.nominal.w_min << ", " << config.settings.nominal.w_max << "]\n";
	out << "trim within limits: " << (report.trim_within_limits ? "yes" : "no") << "\n";
	for (const std::string &v : report.violations) {
		out << "limit violation: " << v << "\n";
	}
	return report.trim_within_limits ? kExitOk : kExitConfig;
}

} // namespace hexsim
