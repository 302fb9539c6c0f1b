#include "hexsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <type_traits>
#include <vector>

#include "hexsim/errors.hpp"

namespace hexsim {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string_view trim(std::string_view s)
{
	const auto first = s.find_first_not_of(" \t\r");
	if (first == std::string_view::npos) {
		return {};
	}
	const auto last = s.find_last_not_of(" \t\r");
	return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s)
{
	std::vector<std::string_view> out;
	std::size_t i = 0;
	while (i < s.size()) {
		while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) {
			++i;
		}
		const std::size_t start = i;
		while (i < s.size() && s[i] != ' ' && s[i] != '\t') {
			++i;
		}
		if (i > start) {
			out.push_back(s.substr(start, i - start));
		}
	}
	return out;
}

double parse_double(std::string_view s, int line)
{
	double v{};
	const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
	if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
		throw ConfigError("expected a number, got '" + std::string(s) + "'", line);
	}
	return v;
}

std::uint64_t parse_u64(std::string_view s, int line)
{
	std::uint64_t v{};
	const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
	if (ec != std::errc{} || ptr != s.data() + s.size()) {
		throw ConfigError("expected a non-negative integer, got '" + std::string(s) + "'", line);
	}
	return v;
}

int parse_int(std::string_view s, int line)
{
	int v{};
	const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
	if (ec != std::errc{} || ptr != s.data() + s.size()) {
		throw ConfigError("expected an integer, got '" + std::string(s) + "'", line);
	}
	return v;
}

bool parse_bool(std::string_view s, int line)
{
	if (s == "true") {
		return true;
	}
	if (s == "false") {
		return false;
	}
	throw ConfigError("expected true or false, got '" + std::string(s) + "'", line);
}

Vec3 parse_vec3(std::string_view s, int line)
{
	const auto parts = split_ws(s);
	if (parts.size() == 1) {
		return Vec3::Constant(parse_double(parts[0], line));
	}
	if (parts.size() == 3) {
		return {parse_double(parts[0], line), parse_double(parts[1], line), parse_double(parts[2], line)};
	}
	throw ConfigError("expected 1 or 3 numbers, got " + std::to_string(parts.size()), line);
}

std::string fmt(double v)
{
	char buf[32];
	const auto res = std::to_chars(buf, buf + sizeof(buf), v);
	return std::string(buf, res.ptr);
}

std::string fmt(const Vec3 &v)
{
	return fmt(v.x()) + " " + fmt(v.y()) + " " + fmt(v.z());
}

struct Field {
	std::string_view section;
	std::string_view key;
	std::function<void(RunConfig &, std::string_view, int)> set;
	// Empty when the field is unset (optional overrides).
	std::function<std::string(const RunConfig &)> get;
};

template <typename T>
std::string fmt_optional(const std::optional<T> &v)
{
	if (!v) {
		return {};
	}
	if constexpr (std::is_same_v<T, bool>) {
		return *v ? "true" : "false";
	} else if constexpr (std::is_same_v<T, double>) {
		return fmt(*v);
	} else {
		return std::to_string(*v);
	}
}

#define HEXSIM_DOUBLE(sec, name, expr)                                                                  \
	Field                                                                                           \
	{                                                                                               \
		sec, name, [](RunConfig &c, std::string_view v, int l) { expr = parse_double(v, l); }, \
			[](const RunConfig &c) { return fmt(expr); }                                    \
	}
#define HEXSIM_VEC3(sec, name, expr)                                                                  \
	Field                                                                                         \
	{                                                                                             \
		sec, name, [](RunConfig &c, std::string_view v, int l) { expr = parse_vec3(v, l); }, \
			[](const RunConfig &c) { return fmt(expr); }                                  \
	}
#define HEXSIM_OPTIONAL_DOUBLE(sec, name, expr)                                                         \
	Field                                                                                           \
	{                                                                                               \
		sec, name, [](RunConfig &c, std::string_view v, int l) { expr = parse_double(v, l); }, \
			[](const RunConfig &c) { return fmt_optional(expr); }                           \
	}

const std::vector<Field> &fields()
{
	static const std::vector<Field> table{
		HEXSIM_DOUBLE("platform", "mass", c.settings.nominal.mass),
		HEXSIM_VEC3("platform", "inertia", c.settings.nominal.inertia_diag),
		HEXSIM_DOUBLE("platform", "c_f", c.settings.nominal.c_f),
		HEXSIM_DOUBLE("platform", "c_tau", c.settings.nominal.c_tau),
		HEXSIM_DOUBLE("platform", "arm_length", c.settings.nominal.arm_length),
		Field{"platform", "tilt_deg",
		      [](RunConfig &c, std::string_view v, int l) { c.settings.nominal.tilt_angle = parse_double(v, l) * kDeg; },
		      [](const RunConfig &c) { return fmt(c.settings.nominal.tilt_angle / kDeg); }},
		HEXSIM_DOUBLE("platform", "w_min", c.settings.nominal.w_min),
		HEXSIM_DOUBLE("platform", "w_max", c.settings.nominal.w_max),
		HEXSIM_DOUBLE("platform", "motor_time_constant", c.settings.nominal.motor_time_constant),

		HEXSIM_DOUBLE("airframe", "cf_scale", c.settings.deviation.cf_scale),
		HEXSIM_VEC3("airframe", "com_offset", c.settings.deviation.com_offset),

		Field{"controller", "type",
		      [](RunConfig &c, std::string_view v, int l) {
			      const auto kind = controller_kind_from_string(v);
			      if (!kind) {
				      throw ConfigError("unknown controller '" + std::string(v) + "' (geo, indi)", l);
			      }
			      c.controller = *kind;
		      },
		      [](const RunConfig &c) { return std::string(to_string(c.controller)); }},
		HEXSIM_VEC3("controller", "k_p", c.settings.gains.k_p),
		HEXSIM_VEC3("controller", "k_v", c.settings.gains.k_v),
		HEXSIM_VEC3("controller", "k_q", c.settings.gains.k_q),
		HEXSIM_VEC3("controller", "k_w", c.settings.gains.k_w),
		HEXSIM_DOUBLE("controller", "filter_cutoff_hz", c.settings.filter_cutoff_hz),
		HEXSIM_DOUBLE("controller", "filter_damping", c.settings.filter_damping),

		HEXSIM_DOUBLE("sensors", "gyro_sigma", c.settings.sensor_noise.gyro_sigma),
		HEXSIM_DOUBLE("sensors", "accel_sigma", c.settings.sensor_noise.accel_sigma),
		HEXSIM_DOUBLE("sensors", "rotor_sigma", c.settings.sensor_noise.rotor_sigma),

		HEXSIM_DOUBLE("reference", "translation_wn", c.settings.shaping.translation_wn),
		HEXSIM_DOUBLE("reference", "attitude_wn", c.settings.shaping.attitude_wn),

		HEXSIM_DOUBLE("simulation", "sim_rate", c.settings.sim_rate),
		HEXSIM_DOUBLE("simulation", "pose_rate", c.settings.pose_rate),

		Field{"scenario", "id",
		      [](RunConfig &c, std::string_view v, int l) {
			      try {
				      c.scenario = scenario_id_from_string(v);
			      } catch (const UnknownScenario &e) {
				      throw ConfigError(e.what(), l);
			      }
		      },
		      [](const RunConfig &c) { return std::string(to_string(c.scenario)); }},
		HEXSIM_OPTIONAL_DOUBLE("scenario", "controller_freq", c.overrides.controller_freq),
		HEXSIM_OPTIONAL_DOUBLE("scenario", "cf_mismatch", c.overrides.model_mismatch_cf),
		HEXSIM_OPTIONAL_DOUBLE("scenario", "noise_scale", c.overrides.noise_scale),
		HEXSIM_OPTIONAL_DOUBLE("scenario", "duration", c.overrides.duration),
		Field{"scenario", "gust",
		      [](RunConfig &c, std::string_view v, int l) { c.overrides.gust = parse_bool(v, l); },
		      [](const RunConfig &c) { return fmt_optional(c.overrides.gust); }},

		Field{"run", "seed", [](RunConfig &c, std::string_view v, int l) { c.seed = parse_u64(v, l); },
		      [](const RunConfig &c) { return std::to_string(c.seed); }},
		Field{"run", "repetitions", [](RunConfig &c, std::string_view v, int l) { c.repetitions = parse_int(v, l); },
		      [](const RunConfig &c) { return std::to_string(c.repetitions); }},
		Field{"run", "out", [](RunConfig &c, std::string_view v, int) { c.out_dir = std::string(v); },
		      [](const RunConfig &c) { return c.out_dir.string(); }},
	};
	return table;
}

#undef HEXSIM_DOUBLE
#undef HEXSIM_VEC3
#undef HEXSIM_OPTIONAL_DOUBLE

bool known_section(std::string_view name)
{
	for (const Field &f : fields()) {
		if (f.section == name) {
			return true;
		}
	}
	return false;
}

} // namespace

void RunConfig::validate() const
{
	settings.nominal.validate();
	settings.gains.validate();
	if (!(settings.deviation.cf_scale > 0.0)) {
		throw ConfigError("airframe.cf_scale must be positive");
	}
	if (!(settings.filter_cutoff_hz > 0.0) || !(settings.filter_damping > 0.0)) {
		throw ConfigError("filter cutoff and damping must be positive");
	}
	const NoiseSpec &n = settings.sensor_noise;
	if (n.gyro_sigma < 0.0 || n.accel_sigma < 0.0 || n.rotor_sigma < 0.0) {
		throw ConfigError("sensor sigmas must be non-negative");
	}
	if (!(settings.shaping.translation_wn > 0.0) || !(settings.shaping.attitude_wn > 0.0)) {
		throw ConfigError("reference natural frequencies must be positive");
	}
	for (double f : kControllerFrequencies) {
		const double ratio = settings.sim_rate / f;
		if (std::abs(ratio - std::round(ratio)) > 1e-9) {
			throw ConfigError("sim_rate must be an integer multiple of every controller frequency");
		}
	}
	const double pose_ratio = settings.sim_rate / settings.pose_rate;
	if (!(settings.pose_rate > 0.0) || std::abs(pose_ratio - std::round(pose_ratio)) > 1e-9) {
		throw ConfigError("pose_rate must divide sim_rate");
	}
	if (repetitions < 1) {
		throw ConfigError("repetitions must be at least 1");
	}
	build();
}

Scenario RunConfig::build() const
{
	return build(controller);
}

Scenario RunConfig::build(ControllerKind kind) const
{
	ScenarioOverrides o = overrides;
	o.seed = seed;
	return build_scenario(scenario, kind, o);
}

RunConfig parse_config(std::string_view text)
{
	RunConfig config;
	std::string section;
	std::vector<std::string> seen;
	int line_no = 0;

	std::size_t pos = 0;
	while (pos <= text.size()) {
		const std::size_t eol = std::min(text.find('\n', pos), text.size());
		std::string_view line = text.substr(pos, eol - pos);
		pos = eol + 1;
		++line_no;

		if (const auto hash = line.find('#'); hash != std::string_view::npos) {
			line = line.substr(0, hash);
		}
		line = trim(line);
		if (line.empty()) {
			continue;
		}

		if (line.front() == '[') {
			if (line.back() != ']') {
				throw ConfigError("malformed section header", line_no);
			}
			section = std::string(trim(line.substr(1, line.size() - 2)));
			if (!known_section(section)) {
				throw ConfigError("unknown section [" + section + "]", line_no);
			}
			continue;
		}

		const auto eq = line.find('=');
		if (eq == std::string_view::npos) {
			throw ConfigError("expected 'key = value'", line_no);
		}
		const std::string_view key = trim(line.substr(0, eq));
		const std::string_view value = trim(line.substr(eq + 1));
		if (section.empty()) {
			throw ConfigError("key '" + std::string(key) + "' outside of any section", line_no);
		}
		if (value.empty()) {
			throw ConfigError("missing value for '" + std::string(key) + "'", line_no);
		}

		const Field *field = nullptr;
		for (const Field &f : fields()) {
			if (f.section == section && f.key == key) {
				field = &f;
				break;
			}
		}
		if (field == nullptr) {
			throw ConfigError("unknown key '" + std::string(key) + "' in [" + section + "]", line_no);
		}
		const std::string full = section + "." + std::string(key);
		if (std::find(seen.begin(), seen.end(), full) != seen.end()) {
			throw ConfigError("duplicate key '" + full + "'", line_no);
		}
		seen.push_back(full);
		field->set(config, value, line_no);
	}

	apply_hex_layout(config.settings.nominal);
	return config;
}

RunConfig load_config(const std::filesystem::path &path)
{
	std::ifstream in(path);
	if (!in) {
		throw IoError("cannot read config '" + path.string() + "'");
	}
	std::ostringstream buf;
	buf << in.rdbuf();
	return parse_config(buf.str());
}

std::string format_config(const RunConfig &config)
{
	std::ostringstream out;
	std::string_view section;
	for (const Field &f : fields()) {
		const std::string value = f.get(config);
		if (value.empty()) {
			continue;
		}
		if (f.section != section) {
			if (!section.empty()) {
				out << '\n';
			}
			section = f.section;
			out << '[' << section << "]\n";
		}
		out << f.key << " = " << value << '\n';
	}
	return out.str();
}

} // namespace hexsim
