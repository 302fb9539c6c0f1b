#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hexsim/controllers.hpp"
#include "hexsim/dynamics.hpp"
#include "hexsim/reference_model.hpp"

namespace hexsim {

enum class ScenarioId { exp1, exp2, exp3, exp4, exp5 };

std::string_view to_string(ScenarioId id);
/// Throws UnknownScenario.
ScenarioId scenario_id_from_string(std::string_view name);

inline constexpr std::array<double, 5> kControllerFrequencies{500.0, 250.0, 125.0, 62.5, 50.0};
inline constexpr std::array<double, 6> kNoiseScales{0.0, 1.0, 3.0, 7.0, 15.0, 31.0};

/// Setpoint at time t. With `ramp`, the position moves linearly from the
/// previous keyframe's position and reaches this one at `t`; otherwise the
/// setpoint steps at `t`. Attitude always steps.
struct Keyframe {
	double t{};
	Vec3 position{Vec3::Zero()};
	Vec3 euler{Vec3::Zero()};  // roll, pitch, yaw rad
	bool ramp{false};
};

class ReferenceScript {
public:
	ReferenceScript() = default;
	explicit ReferenceScript(std::vector<Keyframe> keyframes);

	struct Target {
		Vec3 position;
		Vec3 euler;
	};
	Target at(double t) const;

	const std::vector<Keyframe> &keyframes() const { return keyframes_; }

private:
	std::vector<Keyframe> keyframes_;
};

/// A commanded single-axis step used for rise-time evaluation.
struct StepEvent {
	double onset{};   // s
	double from{};
	double to{};
	double end{};     // end of the evaluation window, s
};

struct Scenario {
	ScenarioId id{ScenarioId::exp1};
	ControllerKind controller{ControllerKind::indi};
	double controller_freq{500.0};
	double model_mismatch_cf{1.0};
	DisturbanceSpec disturbance;
	double noise_scale{0.0};
	ReferenceScript reference_script;
	double duration{};
	std::uint64_t seed{1};
	double metric_start{2.0};          // s, warm-up excluded from metrics
	std::optional<StepEvent> roll_step;  // first roll step, if any
	bool gust{false};

	void validate() const;
	bool operator==(const Scenario &other) const;
};

struct ScenarioOverrides {
	std::optional<double> controller_freq;
	std::optional<double> model_mismatch_cf;
	std::optional<double> noise_scale;
	std::optional<double> duration;
	std::optional<std::uint64_t> seed;
	std::optional<bool> gust;
};

/// Throws UnknownScenario / ConfigError.
Scenario build_scenario(ScenarioId id, ControllerKind controller, const ScenarioOverrides &overrides = {});

/// How the simulated airframe differs from the nominal model the
/// controllers are given. Zero deviation means an exact model.
struct AirframeDeviation {
	double cf_scale{1.0};             // actual c_f / nominal c_f
	Vec3 com_offset{Vec3::Zero()};    // m, body

	bool is_exact() const { return cf_scale == 1.0 && com_offset.isZero(0.0); }

	/// Default for the experiment scenarios: rotors 15 % stronger than the
	/// nominal c_f and a 2.8 mm lateral CoM offset.
	static AirframeDeviation as_built() { return {1.15, Vec3(0.002, -0.002, 0.0)}; }
};

/// Everything about the simulated world and controller tuning that is not
/// specific to one scenario.
struct SimSettings {
	PlatformParams nominal{default_params()};
	AirframeDeviation deviation{AirframeDeviation::as_built()};
	Gains gains;
	double filter_cutoff_hz{15.0};
	double filter_damping{0.7};
	NoiseSpec sensor_noise;  // per-channel sigma at the 1x level
	ShapingConfig shaping;
	double sim_rate{2000.0};  // Hz
	double pose_rate{250.0};  // Hz

	FilterConfig filter_config(double controller_freq) const;
	/// The simulated vehicle: nominal parameters with the deviation applied.
	PlatformParams plant() const;
};

struct LogRow {
	double t{};
	Vec3 p, v;
	UnitQuaternion q;
	Vec3 omega;
	Vec3 p_ref, v_ref;
	UnitQuaternion q_ref;
	Vec3 omega_ref;
	Vec3 e_p;          // p_ref − p, m
	Vec3 e_att_deg;    // body-frame attitude error, deg
	RotorVec u, w_cmd, w_meas;
	unsigned sat_flags{};
};

using RunLog = std::vector<LogRow>;

struct TimeWindow {
	double start{};
	double end{};
};

struct RunMetrics {
	std::array<double, 3> pos_mean_abs{};      // m
	std::array<double, 3> pos_peak_abs{};      // m
	std::array<double, 3> att_mean_abs_deg{};  // roll, pitch, yaw
	std::array<double, 3> att_peak_abs_deg{};
	std::optional<double> roll_rise_time;      // s, 10-90 %
	double lon_att_mean_deg{};
	double lon_att_std_deg{};
	double pos_norm_mean{};
	double pos_norm_std{};
	double pos_norm_peak{};
	std::size_t samples{};
};

struct RunResult {
	RunLog log;
	RunMetrics metrics;
};

/// Closed-loop run: plant at sim_rate, controller at the scenario rate,
/// one log row per controller tick. Throws NonFiniteState with the
/// scenario and time attached.
RunResult run_scenario(const Scenario &scenario, const SimSettings &settings);

struct SignalSample {
	double t;
	double value;
};

/// 10 %–90 % rise time of `signal` for `step`, with linear interpolation
/// between samples. Throws NotReached.
double rise_time(const std::vector<SignalSample> &signal, const StepEvent &step);

/// Per-axis means/peaks and norm statistics over samples with t in
/// [window.start, window.end]. Throws EmptyWindow.
RunMetrics error_statistics(const RunLog &log, const TimeWindow &window);

/// Pools samples of several logs (each restricted to `window`).
RunMetrics error_statistics(const std::vector<const RunLog *> &logs, const TimeWindow &window);

struct AggregateResult {
	RunMetrics pooled;
	std::vector<RunMetrics> per_run;
	std::vector<RunLog> logs;  // kept only when requested
};

/// n runs with seeds seed_base .. seed_base+n−1, executed in parallel.
/// Statistics are pooled over all windowed samples of all runs.
AggregateResult repeat_runs(const Scenario &scenario, const SimSettings &settings, int n,
			    std::uint64_t seed_base, bool keep_logs = false);

/// Actual roll angle (deg) per log row, for rise-time evaluation.
std::vector<SignalSample> roll_signal_deg(const RunLog &log);

} // namespace hexsim
