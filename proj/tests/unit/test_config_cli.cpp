#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "hexsim/commands.hpp"
#include "hexsim/errors.hpp"

using namespace hexsim;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
	TempDir()
	{
		const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
		path_ = fs::temp_directory_path() / (std::string("hexsim_") + info->test_suite_name() + "_" + info->name());
		fs::remove_all(path_);
	}
	~TempDir() { fs::remove_all(path_); }
	const fs::path &path() const { return path_; }

private:
	fs::path path_;
};

std::string read_file(const fs::path &p)
{
	std::ifstream f(p, std::ios::binary);
	std::ostringstream s;
	s << f.rdbuf();
	return s.str();
}

std::vector<std::string> split(const std::string &line, char sep = ',')
{
	std::vector<std::string> out;
	std::string cell;
	std::istringstream s(line);
	while (std::getline(s, cell, sep)) {
		out.push_back(cell);
	}
	return out;
}

int config_error_line(std::string_view text)
{
	try {
		parse_config(text);
	} catch (const ConfigError &e) {
		return e.line();
	}
	return -1;
}

RunConfig short_run(const fs::path &out, double duration = 3.0)
{
	RunConfig c;
	c.out_dir = out;
	c.overrides.duration = duration;
	return c;
}

} // namespace

TEST(Config, EmptyTextGivesDefaults)
{
	const RunConfig c = parse_config("# nothing here\n\n");
	EXPECT_EQ(c.scenario, ScenarioId::exp1);
	EXPECT_EQ(c.controller, ControllerKind::indi);
	EXPECT_EQ(c.seed, 1u);
	EXPECT_EQ(c.repetitions, 1);
	EXPECT_DOUBLE_EQ(c.settings.nominal.c_f, default_params().c_f);
}

TEST(Config, ParsesSectionsAndBroadcastsVectors)
{
	const RunConfig c = parse_config(R"(
[platform]
mass = 3.1   # heavier battery
inertia = 0.09 0.09 0.15
[controller]
type = geo
k_p = 5
[scenario]
id = exp2
noise_scale = 7
[run]
seed = 17
repetitions = 4
out = results/a
)");
	EXPECT_DOUBLE_EQ(c.settings.nominal.mass, 3.1);
	EXPECT_EQ(c.settings.nominal.inertia_diag, Vec3(0.09, 0.09, 0.15));
	EXPECT_EQ(c.controller, ControllerKind::geo);
	EXPECT_EQ(c.settings.gains.k_p, Vec3::Constant(5.0));
	EXPECT_EQ(c.scenario, ScenarioId::exp2);
	EXPECT_EQ(c.overrides.noise_scale, 7.0);
	EXPECT_EQ(c.seed, 17u);
	EXPECT_EQ(c.repetitions, 4);
	EXPECT_EQ(c.out_dir, fs::path("results/a"));
}

TEST(Config, ErrorsCarryLineNumbers)
{
	EXPECT_EQ(config_error_line("[platform]\nmas = 2\n"), 2);
	EXPECT_EQ(config_error_line("\n\n[plat]\n"), 3);
	EXPECT_EQ(config_error_line("mass = 2\n"), 1);
	EXPECT_EQ(config_error_line("[platform]\nmass = 2\nmass = 3\n"), 3);
	EXPECT_EQ(config_error_line("[platform]\nmass = two\n"), 2);
	EXPECT_EQ(config_error_line("[platform]\nmass =\n"), 2);
	EXPECT_EQ(config_error_line("[platform]\ninertia = 1 2\n"), 2);
	EXPECT_EQ(config_error_line("[scenario]\nid = exp9\n"), 2);
}

TEST(Config, FormatRoundTrips)
{
	RunConfig c;
	c.settings.nominal.mass = 3.3;
	c.settings.deviation = {1.07, Vec3(0.001, 0.0, -0.003)};
	c.settings.gains.k_q = Vec3(80, 85, 40);
	c.settings.sensor_noise.gyro_sigma = 0.0123456789;
	c.scenario = ScenarioId::exp4;
	c.controller = ControllerKind::geo;
	c.overrides.controller_freq = 62.5;
	c.overrides.gust = true;
	c.seed = 99;
	c.repetitions = 3;
	c.out_dir = "x/y";

	const RunConfig back = parse_config(format_config(c));
	EXPECT_EQ(format_config(back), format_config(c));
	EXPECT_EQ(back.settings.nominal.mass, 3.3);
	EXPECT_EQ(back.settings.deviation.com_offset, c.settings.deviation.com_offset);
	EXPECT_EQ(back.settings.gains.k_q, c.settings.gains.k_q);
	EXPECT_EQ(back.settings.sensor_noise.gyro_sigma, 0.0123456789);
	EXPECT_EQ(back.overrides.controller_freq, 62.5);
	EXPECT_EQ(back.seed, 99u);
	EXPECT_TRUE(back.settings.nominal.rotor_positions == c.settings.nominal.rotor_positions);
}

TEST(Config, LoadMissingFileIsIoError)
{
	EXPECT_THROW(load_config("/nonexistent/hexsim.cfg"), IoError);
}

TEST(Output, FormatDoubleRoundTrips)
{
	for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, 375.49183}) {
		const std::string s = format_double(v);
		double back = 0.0;
		std::from_chars(s.data(), s.data() + s.size(), back);
		EXPECT_EQ(back, v);
	}
}

TEST(CmdRun, WritesLogAndMetrics)
{
	TempDir dir;
	std::ostringstream out, err;
	RunConfig c = short_run(dir.path());
	c.overrides.model_mismatch_cf = 0.5;
	ASSERT_EQ(cmd_run(c, out, err), kExitOk) << err.str();

	std::istringstream log(read_file(dir.path() / "log.csv"));
	std::string header, first;
	std::getline(log, header);
	std::getline(log, first);
	const std::vector<std::string> cols = split(header);
	EXPECT_EQ(cols, log_columns());
	EXPECT_EQ(cols.front(), "t");
	EXPECT_EQ(cols.back(), "sat_flags");
	EXPECT_EQ(split(first).size(), cols.size());
	std::size_t rows = 1;
	for (std::string line; std::getline(log, line);) {
		++rows;
	}
	EXPECT_EQ(rows, 3u * 500u + 1u);

	const auto doc = nlohmann::json::parse(read_file(dir.path() / "metrics.json"));
	EXPECT_EQ(doc["version"], kVersion);
	EXPECT_EQ(doc["seed"], 1);
	EXPECT_EQ(doc["scenario"]["model_mismatch_cf"], 0.5);
	EXPECT_EQ(doc["config"]["scenario"]["cf_mismatch"], 0.5);
	EXPECT_EQ(doc["config"]["platform"]["mass"], c.settings.nominal.mass);
	EXPECT_TRUE(doc["metrics"]["lon_att_mean_deg"].is_number());
	EXPECT_FALSE(fs::exists(dir.path() / "log.csv.tmp"));
}

TEST(CmdRun, SameSeedIsByteIdentical)
{
	TempDir dir;
	std::ostringstream out, err;
	RunConfig c = short_run(dir.path() / "a");
	c.overrides.noise_scale = 3.0;
	c.seed = 5;
	ASSERT_EQ(cmd_run(c, out, err), kExitOk);
	c.out_dir = dir.path() / "b";
	ASSERT_EQ(cmd_run(c, out, err), kExitOk);
	EXPECT_EQ(read_file(dir.path() / "a" / "log.csv"), read_file(dir.path() / "b" / "log.csv"));
	auto a = nlohmann::json::parse(read_file(dir.path() / "a" / "metrics.json"));
	auto b = nlohmann::json::parse(read_file(dir.path() / "b" / "metrics.json"));
	a["config"]["run"].erase("out");
	b["config"]["run"].erase("out");
	EXPECT_EQ(a.dump(), b.dump());
}

TEST(CmdRun, LogValuesParseBackExactly)
{
	const RunResult r = run_scenario(build_scenario(ScenarioId::exp1, ControllerKind::geo, {.duration = 2.5}),
					 SimSettings{});
	std::ostringstream csv;
	write_log_csv(csv, r.log);
	std::istringstream in(csv.str());
	std::string line;
	std::getline(in, line);
	for (const LogRow &row : r.log) {
		std::getline(in, line);
		const std::vector<std::string> cells = split(line);
		auto num = [&cells](std::size_t i) {
			double v = 0.0;
			std::from_chars(cells[i].data(), cells[i].data() + cells[i].size(), v);
			return v;
		};
		ASSERT_EQ(num(0), row.t);
		ASSERT_EQ(num(1), row.p.x());
		ASSERT_EQ(num(7), row.q.w());
		ASSERT_EQ(num(33), row.u(0));
	}
}

TEST(CmdRun, ExitCodes)
{
	TempDir dir;
	std::ostringstream out, err;

	RunConfig bad = short_run(dir.path());
	bad.repetitions = 0;
	EXPECT_EQ(cmd_run(bad, out, err), kExitConfig);

	RunConfig diverge = short_run(dir.path());
	diverge.settings.nominal.motor_time_constant = 1e-6;
	EXPECT_EQ(cmd_run(diverge, out, err), kExitDivergence);
	EXPECT_NE(err.str().find("exp1/indi"), std::string::npos);

	fs::create_directories(dir.path());
	std::ofstream(dir.path() / "file") << "x";
	RunConfig io = short_run(dir.path() / "file" / "sub");
	EXPECT_EQ(cmd_run(io, out, err), kExitIo);
}

TEST(CmdSweep, GridSizes)
{
	RunConfig c;
	c.overrides.duration = 3.0;
	const std::vector<SweepRow> freq = run_sweep(c, SweepAxis::frequency);
	const std::vector<SweepRow> noise = run_sweep(c, SweepAxis::noise);
	EXPECT_EQ(freq.size(), 10u);
	EXPECT_EQ(noise.size(), 12u);
	for (const SweepRow &r : freq) {
		EXPECT_TRUE(r.ok) << r.error;
		EXPECT_EQ(r.axis, "frequency");
	}
	EXPECT_EQ(noise.front().value, 0.0);
	EXPECT_EQ(noise.back().value, 31.0);
}

TEST(CmdSweep, CsvAndFailedCells)
{
	TempDir dir;
	std::ostringstream out, err;
	RunConfig c;
	c.overrides.duration = 3.0;
	c.out_dir = dir.path();
	ASSERT_EQ(cmd_sweep(c, SweepAxis::noise, out, err), kExitOk) << err.str();
	std::istringstream csv(read_file(dir.path() / "sweep.csv"));
	std::string header;
	std::getline(csv, header);
	EXPECT_EQ(header, "axis,value,controller,repetitions,status,lon_att_mean_deg,lon_att_std_deg,pos_norm_mean_m,"
			  "pos_norm_std_m,error");
	int rows = 0;
	for (std::string line; std::getline(csv, line); ++rows) {
		EXPECT_EQ(split(line)[4], "ok");
	}
	EXPECT_EQ(rows, 12);

	c.settings.nominal.motor_time_constant = 1e-6;
	EXPECT_EQ(cmd_sweep(c, SweepAxis::noise, out, err), kExitDivergence);
	EXPECT_NE(read_file(dir.path() / "sweep.csv").find("failed"), std::string::npos);

	c.repetitions = 0;
	EXPECT_EQ(cmd_sweep(c, SweepAxis::noise, out, err), kExitConfig);
	EXPECT_THROW(sweep_axis_from_string("wind"), ConfigError);
}

TEST(CmdValidate, DefaultPlatform)
{
	const ValidationReport r = validate_platform(default_params());
	EXPECT_TRUE(r.geometry_ok);
	EXPECT_EQ(r.rank, 6);
	EXPECT_NEAR(r.condition_number, 4.987, 1e-3);
	EXPECT_TRUE(r.trim_within_limits);
	for (Eigen::Index i = 0; i < 6; ++i) {
		EXPECT_NEAR(r.trim_w(i), 375.49, 0.01);
	}
	std::ostringstream out, err;
	EXPECT_EQ(cmd_validate(RunConfig{}, out, err), kExitOk);
}

TEST(CmdValidate, FlatRotorsAreDegenerate)
{
	RunConfig c = parse_config("[platform]\ntilt_deg = 0\n");
	const ValidationReport r = validate_platform(c.settings.nominal);
	EXPECT_FALSE(r.geometry_ok);
	EXPECT_EQ(r.rank, 4);
	std::ostringstream out, err;
	EXPECT_EQ(cmd_validate(c, out, err), kExitConfig);
	EXPECT_NE(out.str().find("DegenerateGeometry"), std::string::npos);
}

TEST(CmdValidate, HeavyVehicleExceedsRotorLimit)
{
	RunConfig c = parse_config("[platform]\nmass = 100\n");
	const PlatformParams &p = c.settings.nominal;
	const ValidationReport r = validate_platform(p);
	const double expected = std::sqrt(p.mass * kGravity / (6.0 * p.c_f * std::cos(p.tilt_angle)));
	EXPECT_NEAR(r.trim_w(0), expected, 1e-6 * expected);
	EXPECT_FALSE(r.trim_within_limits);
	EXPECT_EQ(r.violations.size(), 6u);
	std::ostringstream out, err;
	EXPECT_EQ(cmd_validate(c, out, err), kExitConfig);
}
