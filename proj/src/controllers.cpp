#include "hexsim/controllers.hpp"

#include "hexsim/errors.hpp"

namespace hexsim {

void Gains::validate() const
{
	if (!(k_p.minCoeff() > 0.0 && k_v.minCoeff() > 0.0 && k_q.minCoeff() > 0.0 && k_w.minCoeff() > 0.0)) {
		throw ConfigError("all gain entries must be positive");
	}
}

ControllerModel ControllerModel::from_plant(const PlatformParams &plant, double cf_scale)
{
	if (!(cf_scale > 0.0)) {
		throw ConfigError("c_f mismatch factor must be positive");
	}
	ControllerModel model{plant, {}};
	model.params.c_f *= cf_scale;
	model.eff = build_effectiveness(model.params);
	return model;
}

PseudoControl outer_loop(const Gains &gains, const PoseReference &ref, const StateView &state)
{
	const Vec3 e_p = ref.p - state.p;
	const Vec3 e_v = ref.v - state.v;

	const RotationMatrix r_b = quat_to_rotmat(state.q);
	const RotationMatrix r_bd = r_b.transpose() * quat_to_rotmat(ref.q);
	const Vec3 e_q = r_b.transpose() * attitude_error_vector(ref.q, state.q);
	const Vec3 e_w = angular_rate_error(state.omega, ref.omega, state.q, ref.q);

	PseudoControl nu;
	nu.v_p = gains.k_p.cwiseProduct(e_p) + gains.k_v.cwiseProduct(e_v) + ref.a;
	nu.v_att = gains.k_q.cwiseProduct(e_q) - gains.k_w.cwiseProduct(e_w) + r_bd * ref.omega_dot;
	return nu;
}

Vec6 ndi_invert(const PseudoControl &nu, const StateView &state, const ControllerModel &model)
{
	const Mat3 j = model.params.inertia();
	Vec6 wrench;
	wrench.head<3>() = model.params.mass * (kGravity * e3() + nu.v_p);
	wrench.tail<3>() = state.omega.cross(j * state.omega) + j * nu.v_att;
	return wrench;
}

IndiFeedback::IndiFeedback(const FilterConfig &config)
	: accel_(config, 3)
	, gyro_(config, 3)
	, rotor_(config, 6)
	, gyro_rate_(config.sample_time, 3)
{
}

IndiFeedback::Output IndiFeedback::step(const SensorReadings &sensors)
{
	const RotorVec u_meas = sensors.rotor_w_meas.cwiseProduct(sensors.rotor_w_meas.cwiseAbs());
	Output out;
	out.accel_filtered = accel_.step(sensors.accel);
	out.omega_dot = gyro_rate_.step(gyro_.step(sensors.gyro));
	out.u0 = rotor_.step(u_meas);
	return out;
}

void IndiFeedback::warm_start(const SensorReadings &sensors)
{
	accel_.reset(sensors.accel);
	gyro_.reset(sensors.gyro);
	rotor_.reset(sensors.rotor_w_meas.cwiseProduct(sensors.rotor_w_meas.cwiseAbs()));
	gyro_rate_.prime(sensors.gyro);
}

bool IndiFeedback::synchronized() const
{
	return accel_.config() == gyro_.config() && gyro_.config() == rotor_.config();
}

RotorVec indi_invert(const PseudoControl &nu, const IndiFeedback::Output &feedback,
		     const UnitQuaternion &q, const ControllerModel &model)
{
	const Vec3 accel_world = quat_to_rotmat(q) * feedback.accel_filtered - kGravity * e3();
	Vec6 increment;
	increment.head<3>() = model.params.mass * (nu.v_p - accel_world);
	increment.tail<3>() = model.params.inertia() * (nu.v_att - feedback.omega_dot);
	return feedback.u0 + solve_wrench(model.eff, q, increment);
}

std::string_view to_string(ControllerKind kind)
{
	return kind == ControllerKind::geo ? "geo" : "indi";
}

std::optional<ControllerKind> controller_kind_from_string(std::string_view name)
{
	if (name == "geo" || name == "ndi") {
		return ControllerKind::geo;
	}
	if (name == "indi") {
		return ControllerKind::indi;
	}
	return std::nullopt;
}

Controller::Controller(ControllerKind kind, Gains gains, ControllerModel model, const FilterConfig &filter)
	: kind_(kind)
	, gains_(std::move(gains))
	, model_(std::move(model))
	, feedback_(filter)
{
	gains_.validate();
	if (!feedback_.synchronized()) {
		throw ConfigError("INDI feedback filters must share one design");
	}
}

void Controller::warm_start(const SensorReadings &sensors)
{
	feedback_.warm_start(sensors);
}

ActuatorCommand Controller::tick(const PoseReference &ref, const StateView &state, const SensorReadings &sensors)
{
	last_nu_ = outer_loop(gains_, ref, state);

	ActuatorCommand cmd;
	if (kind_ == ControllerKind::geo) {
		last_demand_ = solve_wrench(model_.eff, state.q, ndi_invert(last_nu_, state, model_));
	} else {
		last_demand_ = indi_invert(last_nu_, feedback_.step(sensors), state.q, model_);
	}
	if (!last_demand_.allFinite()) {
		throw NonFiniteState("controller produced a non-finite rotor demand");
	}
	return saturate(model_.params, last_demand_);
}

} // namespace hexsim
