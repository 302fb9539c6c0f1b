#include "hexsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <sstream>
#include <thread>

#include "hexsim/errors.hpp"

namespace hexsim {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

const Vec3 kHoverPosition{0.0, 0.0, 1.0};

// Hover-test load: 500 g hanging mass, hook 0.13 m below the CoM.
constexpr double kLoadForce = 4.905;
constexpr double kHookOffset = 0.13;

constexpr double kStepDeg = 8.0;
constexpr double kYawStepDeg = 45.0;
constexpr double kInitialHover = 5.0;
constexpr double kStepHold = 4.0;

bool in_set(double value, auto const &set)
{
	return std::any_of(set.begin(), set.end(), [value](double v) { return std::abs(v - value) < 1e-9; });
}

ReferenceScript attitude_step_script(double &duration)
{
	std::vector<Keyframe> k{{0.0, kHoverPosition, Vec3::Zero(), false}};
	double t = kInitialHover;
	auto push = [&](const Vec3 &euler_deg) {
		k.push_back({t, kHoverPosition, euler_deg * kDeg, false});
		t += kStepHold;
	};
	push({kStepDeg, 0, 0});
	push({-kStepDeg, 0, 0});
	push({0, 0, 0});
	push({0, kStepDeg, 0});
	push({0, -kStepDeg, 0});
	push({0, 0, 0});
	push({0, 0, kYawStepDeg});
	push({0, 0, -kYawStepDeg});
	push({0, 0, 0});
	duration = t;
	return ReferenceScript(std::move(k));
}

ReferenceScript hover_script()
{
	return ReferenceScript({{0.0, kHoverPosition, Vec3::Zero(), false}});
}

// 2 m square at constant altitude, 0.25 m/s legs, 2 s dwell per corner.
ReferenceScript square_script(double &duration)
{
	constexpr double side = 2.0;
	constexpr double speed = 0.25;
	constexpr double dwell = 2.0;
	const double leg = side / speed;
	const std::array<Vec3, 4> corners{kHoverPosition + Vec3(side, 0, 0), kHoverPosition + Vec3(side, side, 0),
					  kHoverPosition + Vec3(0, side, 0), kHoverPosition};
	std::vector<Keyframe> k{{0.0, kHoverPosition, Vec3::Zero(), false},
				{kInitialHover, kHoverPosition, Vec3::Zero(), false}};
	double t = kInitialHover;
	for (const Vec3 &c : corners) {
		t += leg;
		k.push_back({t, c, Vec3::Zero(), true});
		t += dwell;
	}
	duration = t + 1.0;
	return ReferenceScript(std::move(k));
}

double mean(const std::vector<double> &xs)
{
	double s = 0.0;
	for (double x : xs) {
		s += x;
	}
	return s / static_cast<double>(xs.size());
}

// Population standard deviation.
double stddev(const std::vector<double> &xs, double m)
{
	double s = 0.0;
	for (double x : xs) {
		s += (x - m) * (x - m);
	}
	return std::sqrt(s / static_cast<double>(xs.size()));
}

} // namespace

std::string_view to_string(ScenarioId id)
{
	switch (id) {
	case ScenarioId::exp1: return "exp1";
	case ScenarioId::exp2: return "exp2";
	case ScenarioId::exp3: return "exp3";
	case ScenarioId::exp4: return "exp4";
	case ScenarioId::exp5: return "exp5";
	}
	return "unknown";
}

ScenarioId scenario_id_from_string(std::string_view name)
{
	for (ScenarioId id : {ScenarioId::exp1, ScenarioId::exp2, ScenarioId::exp3, ScenarioId::exp4, ScenarioId::exp5}) {
		if (name == to_string(id)) {
			return id;
		}
	}
	throw UnknownScenario("unknown scenario '" + std::string(name) + "'");
}

ReferenceScript::ReferenceScript(std::vector<Keyframe> keyframes)
	: keyframes_(std::move(keyframes))
{
	if (keyframes_.empty()) {
		throw ConfigError("reference script needs at least one keyframe");
	}
	for (std::size_t i = 1; i < keyframes_.size(); ++i) {
		if (keyframes_[i].t < keyframes_[i - 1].t) {
			throw ConfigError("reference keyframes must be time-ordered");
		}
	}
}

ReferenceScript::Target ReferenceScript::at(double t) const
{
	std::size_t idx = 0;
	while (idx + 1 < keyframes_.size() && keyframes_[idx + 1].t <= t) {
		++idx;
	}
	Target target{keyframes_[idx].position, keyframes_[idx].euler};
	if (idx + 1 < keyframes_.size() && keyframes_[idx + 1].ramp) {
		const Keyframe &a = keyframes_[idx];
		const Keyframe &b = keyframes_[idx + 1];
		const double s = (t - a.t) / (b.t - a.t);
		target.position = a.position + s * (b.position - a.position);
	}
	return target;
}

void Scenario::validate() const
{
	if (!in_set(controller_freq, kControllerFrequencies)) {
		throw ConfigError("controller frequency must be one of 500, 250, 125, 62.5, 50 Hz");
	}
	if (!in_set(noise_scale, kNoiseScales)) {
		throw ConfigError("noise scale must be one of 0, 1, 3, 7, 15, 31");
	}
	if (!(duration > 0.0)) {
		throw ConfigError("scenario duration must be positive");
	}
	if (!(model_mismatch_cf > 0.0)) {
		throw ConfigError("c_f mismatch factor must be positive");
	}
	disturbance.validate();
}

bool Scenario::operator==(const Scenario &o) const
{
	auto same_keys = [](const ReferenceScript &a, const ReferenceScript &b) {
		const auto &ka = a.keyframes();
		const auto &kb = b.keyframes();
		if (ka.size() != kb.size()) {
			return false;
		}
		for (std::size_t i = 0; i < ka.size(); ++i) {
			if (ka[i].t != kb[i].t || ka[i].position != kb[i].position || ka[i].euler != kb[i].euler
			    || ka[i].ramp != kb[i].ramp) {
				return false;
			}
		}
		return true;
	};
	const auto &da = disturbance;
	const auto &db = o.disturbance;
	const bool same_dist = da.kind == db.kind && da.force == db.force && da.moment == db.moment && da.t_on == db.t_on
			       && da.t_off == db.t_off && da.gust_std == db.gust_std
			       && da.gust_corr_time == db.gust_corr_time && da.lever_arm == db.lever_arm;
	const bool same_step = roll_step.has_value() == o.roll_step.has_value()
			       && (!roll_step || (roll_step->onset == o.roll_step->onset && roll_step->from == o.roll_step->from
						  && roll_step->to == o.roll_step->to && roll_step->end == o.roll_step->end));
	return id == o.id && controller == o.controller && controller_freq == o.controller_freq
	       && model_mismatch_cf == o.model_mismatch_cf && same_dist && noise_scale == o.noise_scale
	       && same_keys(reference_script, o.reference_script) && duration == o.duration && seed == o.seed
	       && metric_start == o.metric_start && same_step && gust == o.gust;
}

Scenario build_scenario(ScenarioId id, ControllerKind controller, const ScenarioOverrides &overrides)
{
	Scenario s;
	s.id = id;
	s.controller = controller;

	switch (id) {
	case ScenarioId::exp1:
	case ScenarioId::exp4:
		s.reference_script = attitude_step_script(s.duration);
		s.roll_step = StepEvent{kInitialHover, 0.0, kStepDeg, kInitialHover + kStepHold};
		break;
	case ScenarioId::exp2:
		s.reference_script = hover_script();
		s.duration = 25.0;
		s.disturbance.kind = DisturbanceKind::constant_load;
		s.disturbance.force = Vec3(0.0, -kLoadForce, 0.0);
		s.disturbance.moment = Vec3(0.0, kLoadForce * kHookOffset, 0.0);
		s.disturbance.t_on = 5.0;
		s.disturbance.t_off = 15.0;
		break;
	case ScenarioId::exp3:
		s.reference_script = square_script(s.duration);
		s.gust = overrides.gust.value_or(false);
		break;
	case ScenarioId::exp5:
		s.reference_script = hover_script();
		s.duration = 20.0;
		break;
	}

	if (overrides.controller_freq) {
		s.controller_freq = *overrides.controller_freq;
	}
	// The c_f mismatch is an Experiment-1 protocol; other scenarios accept it
	// as an explicit override only.
	if (overrides.model_mismatch_cf) {
		s.model_mismatch_cf = *overrides.model_mismatch_cf;
	}
	if (overrides.noise_scale) {
		s.noise_scale = *overrides.noise_scale;
	}
	if (overrides.duration) {
		s.duration = *overrides.duration;
	}
	if (overrides.seed) {
		s.seed = *overrides.seed;
	}
	if (id == ScenarioId::exp3 && s.gust) {
		s.disturbance.kind = DisturbanceKind::gust;
		s.disturbance.force = Vec3(2.0, 0.0, 0.0);
		s.disturbance.gust_std = 1.0;
		s.disturbance.gust_corr_time = 0.5;
		s.disturbance.lever_arm = Vec3(0.0, 0.0, -kHookOffset);
		s.disturbance.t_on = kInitialHover;
		s.disturbance.t_off = s.duration + 1.0;
	}

	s.validate();
	return s;
}

FilterConfig SimSettings::filter_config(double controller_freq) const
{
	return {2.0 * std::numbers::pi * filter_cutoff_hz, filter_damping, 1.0 / controller_freq};
}

PlatformParams SimSettings::plant() const
{
	PlatformParams p = nominal;
	p.c_f *= deviation.cf_scale;
	p.com_offset += deviation.com_offset;
	return p;
}

RunResult run_scenario(const Scenario &scenario, const SimSettings &settings)
{
	scenario.validate();

	const PlatformParams plant = settings.plant();
	const EffectivenessMatrices plant_eff = build_effectiveness(plant);
	const ControllerModel model = ControllerModel::from_plant(settings.nominal, scenario.model_mismatch_cf);

	const double dt = 1.0 / settings.sim_rate;
	const long ctrl_every = std::lround(settings.sim_rate / scenario.controller_freq);
	const long pose_every = std::lround(settings.sim_rate / settings.pose_rate);
	const double ctrl_dt = static_cast<double>(ctrl_every) * dt;
	const long total_steps = std::lround(scenario.duration / dt);

	NoiseSpec noise = settings.sensor_noise;
	noise.variance_scale = scenario.noise_scale;
	// Injected degradation: GEO only consumes the gyro among the noisy
	// channels; INDI additionally the accelerometer.
	noise.gyro = true;
	noise.accel = scenario.controller == ControllerKind::indi;
	noise.rotor = false;

	Rng rng(scenario.seed);
	DisturbanceModel disturbance(scenario.disturbance);

	const ReferenceScript::Target start = scenario.reference_script.at(0.0);
	RigidBodyState state = hover_state(plant, plant_eff, start.position);
	state.q = UnitQuaternion::from_euler(start.euler.x(), start.euler.y(), start.euler.z());
	ReferenceModel reference(settings.shaping, start.position, start.euler);

	Controller controller(scenario.controller, settings.gains, model, settings.filter_config(scenario.controller_freq));
	{
		const StateDerivative d0 = derivative(state, plant, plant_eff, state.rotor_w, {});
		NoiseSpec clean = noise;
		clean.variance_scale = 0.0;
		controller.warm_start(synthesize_sensors(state, d0, clean, 0.0, rng));
	}

	ActuatorCommand cmd = saturate(plant, state.rotor_w.cwiseProduct(state.rotor_w));
	Vec3 pose_p = state.p;
	UnitQuaternion pose_q = state.q;

	RunResult result;
	result.log.reserve(static_cast<std::size_t>(total_steps / ctrl_every + 1));

	double t = 0.0;
	try {
		for (long k = 0; k <= total_steps; ++k) {
			t = static_cast<double>(k) * dt;
			const ExternalWrench dist = disturbance.sample(t, rng);

			if (k % pose_every == 0) {
				pose_p = state.p;
				pose_q = state.q;
			}
			if (k % ctrl_every == 0) {
				const StateDerivative d = derivative(state, plant, plant_eff, cmd.w_cmd, dist);
				SensorReadings sensors = synthesize_sensors(state, d, noise, t, rng);
				sensors.pose_p = pose_p;
				sensors.pose_q = pose_q;

				const StateView view{pose_p, state.v, pose_q, sensors.gyro};
				const ReferenceScript::Target target = scenario.reference_script.at(t);
				const PoseReference &ref = k == 0 ? reference.current()
								  : reference.update(target.position, target.euler, ctrl_dt);
				cmd = controller.tick(ref, view, sensors);

				LogRow row;
				row.t = t;
				row.p = state.p;
				row.v = state.v;
				row.q = state.q;
				row.omega = state.omega;
				row.p_ref = ref.p;
				row.v_ref = ref.v;
				row.q_ref = ref.q;
				row.omega_ref = ref.omega;
				row.e_p = ref.p - state.p;
				row.e_att_deg = quat_to_rotmat(state.q).transpose() * attitude_error_vector(ref.q, state.q) / kDeg;
				row.u = cmd.u;
				row.w_cmd = cmd.w_cmd;
				row.w_meas = sensors.rotor_w_meas;
				row.sat_flags = cmd.saturation_mask();
				result.log.push_back(row);
			}
			if (k == total_steps) {
				break;
			}
			state = step(state, plant, plant_eff, cmd, dist, dt);
		}
	} catch (const NonFiniteState &e) {
		std::ostringstream msg;
		msg << to_string(scenario.id) << "/" << to_string(scenario.controller) << " seed " << scenario.seed
		    << " diverged at t = " << t << " s: " << e.what();
		throw NonFiniteState(msg.str());
	}

	result.metrics = error_statistics(result.log, {scenario.metric_start, scenario.duration});
	if (scenario.roll_step) {
		try {
			result.metrics.roll_rise_time = rise_time(roll_signal_deg(result.log), *scenario.roll_step);
		} catch (const NotReached &) {
			result.metrics.roll_rise_time.reset();
		}
	}
	return result;
}

double rise_time(const std::vector<SignalSample> &signal, const StepEvent &step)
{
	const double span = step.to - step.from;
	if (span == 0.0) {
		throw NotReached("zero-magnitude step");
	}
	auto progress = [&](double v) { return (v - step.from) / span; };

	auto crossing = [&](double level) -> std::optional<double> {
		const SignalSample *prev = nullptr;
		for (const SignalSample &s : signal) {
			if (s.t < step.onset) {
				continue;
			}
			if (s.t > step.end) {
				break;
			}
			if (progress(s.value) >= level) {
				if (prev == nullptr) {
					return s.t;
				}
				const double p0 = progress(prev->value);
				const double p1 = progress(s.value);
				return prev->t + (level - p0) / (p1 - p0) * (s.t - prev->t);
			}
			prev = &s;
		}
		return std::nullopt;
	};

	const auto t10 = crossing(0.1);
	const auto t90 = crossing(0.9);
	if (!t10 || !t90) {
		throw NotReached("signal never reached 90 % of the commanded step");
	}
	return *t90 - *t10;
}

RunMetrics error_statistics(const std::vector<const RunLog *> &logs, const TimeWindow &window)
{
	std::vector<double> lon, pos;
	std::array<std::vector<double>, 3> pos_abs, att_abs;
	for (const RunLog *log : logs) {
		for (const LogRow &row : *log) {
			if (row.t < window.start || row.t > window.end) {
				continue;
			}
			for (int i = 0; i < 3; ++i) {
				pos_abs[i].push_back(std::abs(row.e_p(i)));
				att_abs[i].push_back(std::abs(row.e_att_deg(i)));
			}
			lon.push_back(std::hypot(row.e_att_deg.x(), row.e_att_deg.y()));
			pos.push_back(row.e_p.norm());
		}
	}
	if (lon.empty()) {
		throw EmptyWindow("no log samples inside the metric window");
	}

	RunMetrics m;
	for (int i = 0; i < 3; ++i) {
		m.pos_mean_abs[i] = mean(pos_abs[i]);
		m.pos_peak_abs[i] = *std::max_element(pos_abs[i].begin(), pos_abs[i].end());
		m.att_mean_abs_deg[i] = mean(att_abs[i]);
		m.att_peak_abs_deg[i] = *std::max_element(att_abs[i].begin(), att_abs[i].end());
	}
	m.lon_att_mean_deg = mean(lon);
	m.lon_att_std_deg = stddev(lon, m.lon_att_mean_deg);
	m.pos_norm_mean = mean(pos);
	m.pos_norm_std = stddev(pos, m.pos_norm_mean);
	m.pos_norm_peak = *std::max_element(pos.begin(), pos.end());
	m.samples = lon.size();
	return m;
}

RunMetrics error_statistics(const RunLog &log, const TimeWindow &window)
{
	return error_statistics(std::vector<const RunLog *>{&log}, window);
}

AggregateResult repeat_runs(const Scenario &scenario, const SimSettings &settings, int n,
			    std::uint64_t seed_base, bool keep_logs)
{
	if (n < 1) {
		throw ConfigError("repetitions must be at least 1");
	}

	std::vector<RunResult> runs(static_cast<std::size_t>(n));
	const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
	for (int begin = 0; begin < n; begin += static_cast<int>(workers)) {
		const int end = std::min(n, begin + static_cast<int>(workers));
		std::vector<std::future<RunResult>> batch;
		for (int i = begin; i < end; ++i) {
			Scenario s = scenario;
			s.seed = seed_base + static_cast<std::uint64_t>(i);
			batch.push_back(std::async(std::launch::async, [s, &settings] { return run_scenario(s, settings); }));
		}
		for (int i = begin; i < end; ++i) {
			try {
				runs[static_cast<std::size_t>(i)] = batch[static_cast<std::size_t>(i - begin)].get();
			} catch (const NonFiniteState &e) {
				throw NonFiniteState("run " + std::to_string(i) + ": " + e.what());
			}
		}
	}

	AggregateResult agg;
	std::vector<const RunLog *> logs;
	for (const RunResult &r : runs) {
		agg.per_run.push_back(r.metrics);
		logs.push_back(&r.log);
	}
	agg.pooled = error_statistics(logs, {scenario.metric_start, scenario.duration});
	if (keep_logs) {
		for (RunResult &r : runs) {
			agg.logs.push_back(std::move(r.log));
		}
	}
	return agg;
}

std::vector<SignalSample> roll_signal_deg(const RunLog &log)
{
	std::vector<SignalSample> out;
	out.reserve(log.size());
	for (const LogRow &row : log) {
		out.push_back({row.t, row.q.to_euler().x() / kDeg});
	}
	return out;
}

} // namespace hexsim
