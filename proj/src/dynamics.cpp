#include "hexsim/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "hexsim/errors.hpp"

namespace hexsim {

namespace {

using StateVec = Eigen::Matrix<double, 19, 1>;

StateVec pack(const RigidBodyState &s)
{
	StateVec x;
	x << s.p, s.v, s.q.w(), s.q.x(), s.q.y(), s.q.z(), s.omega, s.rotor_w;
	return x;
}

StateVec pack(const StateDerivative &d)
{
	StateVec x;
	x << d.p_dot, d.v_dot, d.q_dot, d.omega_dot, d.rotor_w_dot;
	return x;
}

RigidBodyState unpack(const StateVec &x)
{
	RigidBodyState s;
	s.p = x.segment<3>(0);
	s.v = x.segment<3>(3);
	s.q = UnitQuaternion(x(6), x(7), x(8), x(9));
	s.omega = x.segment<3>(10);
	s.rotor_w = x.segment<6>(13);
	return s;
}

} // namespace

Accelerations rigid_body_accelerations(const RigidBodyState &state, const PlatformParams &params,
				       const EffectivenessMatrices &eff, const RotorVec &applied_u,
				       const ExternalWrench &disturbance)
{
	const Mat3 j = params.inertia();
	const Vec3 force = quat_to_rotmat(state.q) * (eff.F1 * applied_u) + disturbance.force;
	const Vec3 torque = -state.omega.cross(j * state.omega) + eff.F2 * applied_u + disturbance.moment;
	return {force / params.mass - kGravity * e3(), j.ldlt().solve(torque)};
}

StateDerivative derivative(const RigidBodyState &state, const PlatformParams &params,
			   const EffectivenessMatrices &eff, const RotorVec &w_cmd,
			   const ExternalWrench &disturbance)
{
	const RotorVec applied_u = state.rotor_w.cwiseProduct(state.rotor_w.cwiseAbs());
	const Accelerations acc = rigid_body_accelerations(state, params, eff, applied_u, disturbance);

	StateDerivative d;
	d.p_dot = state.v;
	d.v_dot = acc.linear;
	const Eigen::Quaterniond omega_q(0.0, state.omega.x(), state.omega.y(), state.omega.z());
	const Eigen::Quaterniond q_dot = state.q.eigen() * omega_q;
	d.q_dot << 0.5 * q_dot.w(), 0.5 * q_dot.x(), 0.5 * q_dot.y(), 0.5 * q_dot.z();
	d.omega_dot = acc.angular;
	d.rotor_w_dot = (w_cmd - state.rotor_w) / params.motor_time_constant;
	return d;
}

RigidBodyState step(const RigidBodyState &state, const PlatformParams &params,
		    const EffectivenessMatrices &eff, const ActuatorCommand &cmd,
		    const ExternalWrench &disturbance, double dt)
{
	const auto f = [&](const StateVec &x) {
		return pack(derivative(unpack(x), params, eff, cmd.w_cmd, disturbance));
	};

	const StateVec x0 = pack(state);
	const StateVec k1 = f(x0);
	const StateVec k2 = f(x0 + 0.5 * dt * k1);
	const StateVec k3 = f(x0 + 0.5 * dt * k2);
	const StateVec k4 = f(x0 + dt * k3);
	const StateVec x1 = x0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

	if (!x1.allFinite()) {
		std::ostringstream msg;
		msg << "non-finite state after step (p = " << state.p.transpose() << ")";
		throw NonFiniteState(msg.str());
	}
	return unpack(x1);
}

RigidBodyState hover_state(const PlatformParams &params, const EffectivenessMatrices &eff, const Vec3 &p)
{
	RigidBodyState s;
	s.p = p;
	s.rotor_w = hover_trim(params, eff).cwiseSqrt();
	return s;
}

void DisturbanceSpec::validate() const
{
	if (kind == DisturbanceKind::none) {
		return;
	}
	if (!(t_on < t_off)) {
		throw ConfigError("disturbance window requires t_on < t_off");
	}
	if (kind == DisturbanceKind::gust && !(gust_corr_time > 0.0)) {
		throw ConfigError("gust correlation time must be positive");
	}
	if (gust_std < 0.0) {
		throw ConfigError("gust std must be non-negative");
	}
}

DisturbanceModel::DisturbanceModel(DisturbanceSpec spec)
	: spec_(std::move(spec))
{
	spec_.validate();
}

ExternalWrench DisturbanceModel::sample(double t, Rng &rng)
{
	ExternalWrench out;
	if (spec_.kind == DisturbanceKind::none || t < spec_.t_on || t >= spec_.t_off) {
		return out;
	}

	out.force = spec_.force;
	if (spec_.kind == DisturbanceKind::gust && spec_.gust_std > 0.0) {
		std::normal_distribution<double> normal(0.0, 1.0);
		if (!started_) {
			// Start from the stationary distribution.
			colored_ = spec_.gust_std * Eigen::Vector2d(normal(rng), normal(rng));
		} else {
			const double a = std::exp(-(t - last_t_) / spec_.gust_corr_time);
			const double b = spec_.gust_std * std::sqrt(1.0 - a * a);
			colored_ = a * colored_ + b * Eigen::Vector2d(normal(rng), normal(rng));
		}
		out.force.head<2>() += colored_;
	}
	started_ = true;
	last_t_ = t;

	// Lever arm in body axes applied to the world force: exact only at zero
	// attitude, which the gust scenarios hold.
	out.moment = spec_.moment + spec_.lever_arm.cross(out.force);
	return out;
}

SensorReadings synthesize_sensors(const RigidBodyState &state, const StateDerivative &deriv,
				  const NoiseSpec &noise, double t, Rng &rng)
{
	SensorReadings r;
	r.accel = quat_to_rotmat(state.q).transpose() * (deriv.v_dot + kGravity * e3());
	r.gyro = state.omega;
	r.rotor_w_meas = state.rotor_w;
	r.pose_p = state.p;
	r.pose_q = state.q;
	r.timestamp = t;

	const double scale = std::sqrt(noise.variance_scale);
	std::normal_distribution<double> normal(0.0, 1.0);
	auto add_noise = [&](auto &channel, double sigma) {
		const double s = sigma * scale;
		if (s <= 0.0) {
			return;
		}
		for (Eigen::Index i = 0; i < channel.size(); ++i) {
			channel(i) += s * normal(rng);
		}
	};
	if (noise.gyro) {
		add_noise(r.gyro, noise.gyro_sigma);
	}
	if (noise.accel) {
		add_noise(r.accel, noise.accel_sigma);
	}
	if (noise.rotor) {
		add_noise(r.rotor_w_meas, noise.rotor_sigma);
	}
	return r;
}

} // namespace hexsim
