#include "hexsim/output.hpp"

#include <charconv>
#include <fstream>
#include <numbers>
#include <system_error>

#include "hexsim/errors.hpp"

namespace hexsim {

namespace {

void append_vec(std::vector<std::string> &cols, const std::string &prefix, std::initializer_list<const char *> names)
{
	for (const char *n : names) {
		cols.push_back(prefix + n);
	}
}

void append_rotors(std::vector<std::string> &cols, const std::string &prefix)
{
	for (int i = 1; i <= 6; ++i) {
		cols.push_back(prefix + std::to_string(i));
	}
}

nlohmann::json vec_json(const Vec3 &v)
{
	return {v.x(), v.y(), v.z()};
}

nlohmann::json array_json(const std::array<double, 3> &a)
{
	return {a[0], a[1], a[2]};
}

std::string_view kind_name(DisturbanceKind kind)
{
	switch (kind) {
	case DisturbanceKind::none: return "none";
	case DisturbanceKind::constant_load: return "constant_load";
	case DisturbanceKind::gust: return "gust";
	}
	return "unknown";
}

} // namespace

const std::vector<std::string> &log_columns()
{
	static const std::vector<std::string> cols = [] {
		std::vector<std::string> c{"t"};
		append_vec(c, "p_", {"x", "y", "z"});
		append_vec(c, "v_", {"x", "y", "z"});
		append_vec(c, "q_", {"w", "x", "y", "z"});
		append_vec(c, "omega_", {"x", "y", "z"});
		append_vec(c, "p_ref_", {"x", "y", "z"});
		append_vec(c, "v_ref_", {"x", "y", "z"});
		append_vec(c, "q_ref_", {"w", "x", "y", "z"});
		append_vec(c, "omega_ref_", {"x", "y", "z"});
		append_vec(c, "e_p_", {"x", "y", "z"});
		append_vec(c, "e_att_deg_", {"x", "y", "z"});
		append_rotors(c, "u_");
		append_rotors(c, "w_cmd_");
		append_rotors(c, "w_meas_");
		c.emplace_back("sat_flags");
		return c;
	}();
	return cols;
}

std::string format_double(double v)
{
	char buf[32];
	const auto res = std::to_chars(buf, buf + sizeof(buf), v);
	return std::string(buf, res.ptr);
}

void write_log_csv(std::ostream &out, const RunLog &log)
{
	const auto &cols = log_columns();
	for (std::size_t i = 0; i < cols.size(); ++i) {
		out << (i ? "," : "") << cols[i];
	}
	out << '\n';

	std::string line;
	auto put = [&line](double v) {
		line += format_double(v);
		line += ',';
	};
	auto put3 = [&put](const Vec3 &v) {
		put(v.x());
		put(v.y());
		put(v.z());
	};
	auto putq = [&put](const UnitQuaternion &q) {
		put(q.w());
		put(q.x());
		put(q.y());
		put(q.z());
	};
	auto put6 = [&put](const RotorVec &r) {
		for (Eigen::Index i = 0; i < 6; ++i) {
			put(r(i));
		}
	};

	for (const LogRow &row : log) {
		line.clear();
		put(row.t);
		put3(row.p);
		put3(row.v);
		putq(row.q);
		put3(row.omega);
		put3(row.p_ref);
		put3(row.v_ref);
		putq(row.q_ref);
		put3(row.omega_ref);
		put3(row.e_p);
		put3(row.e_att_deg);
		put6(row.u);
		put6(row.w_cmd);
		put6(row.w_meas);
		line += std::to_string(row.sat_flags);
		out << line << '\n';
	}
}

nlohmann::json to_json(const RunMetrics &m)
{
	nlohmann::json j;
	j["pos_mean_abs_m"] = array_json(m.pos_mean_abs);
	j["pos_peak_abs_m"] = array_json(m.pos_peak_abs);
	j["att_mean_abs_deg"] = array_json(m.att_mean_abs_deg);
	j["att_peak_abs_deg"] = array_json(m.att_peak_abs_deg);
	j["roll_rise_time_s"] = m.roll_rise_time ? nlohmann::json(*m.roll_rise_time) : nlohmann::json(nullptr);
	j["lon_att_mean_deg"] = m.lon_att_mean_deg;
	j["lon_att_std_deg"] = m.lon_att_std_deg;
	j["pos_norm_mean_m"] = m.pos_norm_mean;
	j["pos_norm_std_m"] = m.pos_norm_std;
	j["pos_norm_peak_m"] = m.pos_norm_peak;
	j["samples"] = m.samples;
	return j;
}

nlohmann::json to_json(const Scenario &s)
{
	nlohmann::json j;
	j["id"] = to_string(s.id);
	j["controller"] = to_string(s.controller);
	j["controller_freq_hz"] = s.controller_freq;
	j["model_mismatch_cf"] = s.model_mismatch_cf;
	j["noise_scale"] = s.noise_scale;
	j["duration_s"] = s.duration;
	j["seed"] = s.seed;
	j["metric_start_s"] = s.metric_start;
	j["gust"] = s.gust;
	j["disturbance"] = {
		{"kind", kind_name(s.disturbance.kind)},
		{"force_n", vec_json(s.disturbance.force)},
		{"moment_nm", vec_json(s.disturbance.moment)},
		{"t_on_s", s.disturbance.t_on},
		{"t_off_s", s.disturbance.t_off},
		{"gust_std_n", s.disturbance.gust_std},
		{"gust_corr_time_s", s.disturbance.gust_corr_time},
		{"lever_arm_m", vec_json(s.disturbance.lever_arm)},
	};
	if (s.roll_step) {
		j["roll_step"] = {{"onset_s", s.roll_step->onset},
				  {"from_deg", s.roll_step->from},
				  {"to_deg", s.roll_step->to},
				  {"end_s", s.roll_step->end}};
	}
	nlohmann::json keys = nlohmann::json::array();
	for (const Keyframe &k : s.reference_script.keyframes()) {
		keys.push_back({{"t", k.t}, {"position", vec_json(k.position)}, {"euler_rad", vec_json(k.euler)}, {"ramp", k.ramp}});
	}
	j["reference_script"] = keys;
	return j;
}

nlohmann::json to_json(const RunConfig &c)
{
	const PlatformParams &p = c.settings.nominal;
	const SimSettings &s = c.settings;
	nlohmann::json j;
	j["platform"] = {
		{"mass", p.mass},
		{"inertia", vec_json(p.inertia_diag)},
		{"c_f", p.c_f},
		{"c_tau", p.c_tau},
		{"arm_length", p.arm_length},
		{"tilt_deg", p.tilt_angle * 180.0 / std::numbers::pi},
		{"w_min", p.w_min},
		{"w_max", p.w_max},
		{"motor_time_constant", p.motor_time_constant},
	};
	j["airframe"] = {{"cf_scale", s.deviation.cf_scale}, {"com_offset", vec_json(s.deviation.com_offset)}};
	j["controller"] = {
		{"type", to_string(c.controller)},
		{"k_p", vec_json(s.gains.k_p)},
		{"k_v", vec_json(s.gains.k_v)},
		{"k_q", vec_json(s.gains.k_q)},
		{"k_w", vec_json(s.gains.k_w)},
		{"filter_cutoff_hz", s.filter_cutoff_hz},
		{"filter_damping", s.filter_damping},
	};
	j["sensors"] = {{"gyro_sigma", s.sensor_noise.gyro_sigma},
			{"accel_sigma", s.sensor_noise.accel_sigma},
			{"rotor_sigma", s.sensor_noise.rotor_sigma}};
	j["reference"] = {{"translation_wn", s.shaping.translation_wn}, {"attitude_wn", s.shaping.attitude_wn}};
	j["simulation"] = {{"sim_rate", s.sim_rate}, {"pose_rate", s.pose_rate}};

	const Scenario resolved = c.build();
	j["scenario"] = {
		{"id", to_string(c.scenario)},
		{"controller_freq", resolved.controller_freq},
		{"cf_mismatch", resolved.model_mismatch_cf},
		{"noise_scale", resolved.noise_scale},
		{"duration", resolved.duration},
		{"gust", resolved.gust},
	};
	j["run"] = {{"seed", c.seed}, {"repetitions", c.repetitions}, {"out", c.out_dir.string()}};
	return j;
}

nlohmann::json metrics_document(const RunConfig &config, const Scenario &scenario, const RunMetrics &metrics,
				const std::vector<RunMetrics> &per_run)
{
	nlohmann::json j;
	j["version"] = kVersion;
	j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "."
			     + std::to_string(EIGEN_MINOR_VERSION);
	j["seed"] = config.seed;
	j["rise_time_definition"] = "10-90 % of the commanded step, linear interpolation";
	j["scenario"] = to_json(scenario);
	j["metrics"] = to_json(metrics);
	if (per_run.size() > 1) {
		nlohmann::json runs = nlohmann::json::array();
		for (const RunMetrics &m : per_run) {
			runs.push_back(to_json(m));
		}
		j["per_run"] = runs;
	}
	j["config"] = to_json(config);
	return j;
}

void write_sweep_csv(std::ostream &out, const std::vector<SweepRow> &rows)
{
	out << "axis,value,controller,repetitions,status,lon_att_mean_deg,lon_att_std_deg,pos_norm_mean_m,pos_norm_std_m,"
	       "error\n";
	for (const SweepRow &r : rows) {
		out << r.axis << ',' << format_double(r.value) << ',' << to_string(r.controller) << ',' << r.repetitions << ','
		    << (r.ok ? "ok" : "failed") << ',';
		if (r.ok) {
			out << format_double(r.metrics.lon_att_mean_deg) << ',' << format_double(r.metrics.lon_att_std_deg) << ','
			    << format_double(r.metrics.pos_norm_mean) << ',' << format_double(r.metrics.pos_norm_std) << ',';
		} else {
			std::string msg = r.error;
			for (char &ch : msg) {
				if (ch == '"' || ch == '\n') {
					ch = '\'';
				}
			}
			out << ",,,,\"" << msg << '"';
		}
		out << '\n';
	}
}

void write_file(const std::filesystem::path &path, const std::string &text)
{
	std::error_code ec;
	if (path.has_parent_path()) {
		std::filesystem::create_directories(path.parent_path(), ec);
		if (ec) {
			throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
		}
	}
	const std::filesystem::path tmp = path.string() + ".tmp";
	{
		std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
		if (!f) {
			throw IoError("cannot open '" + tmp.string() + "' for writing");
		}
		f << text;
		f.flush();
		if (!f) {
			throw IoError("write to '" + tmp.string() + "' failed");
		}
	}
	std::filesystem::rename(tmp, path, ec);
	if (ec) {
		throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
	}
}

} // namespace hexsim
