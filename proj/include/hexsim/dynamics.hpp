#pragma once

#include <random>

#include "hexsim/geometry.hpp"
#include "hexsim/platform.hpp"

namespace hexsim {

using Rng = std::mt19937_64;

/// Simulation truth.
struct RigidBodyState {
	Vec3 p{Vec3::Zero()};      // m, world
	Vec3 v{Vec3::Zero()};      // m/s, world
	UnitQuaternion q;          // body -> world
	Vec3 omega{Vec3::Zero()};  // rad/s, body
	RotorVec rotor_w{RotorVec::Zero()};  // rad/s, actual rotor speeds
};

struct StateDerivative {
	Vec3 p_dot{Vec3::Zero()};
	Vec3 v_dot{Vec3::Zero()};
	Eigen::Vector4d q_dot{Eigen::Vector4d::Zero()};  // (w, x, y, z)
	Vec3 omega_dot{Vec3::Zero()};
	RotorVec rotor_w_dot{RotorVec::Zero()};
};

/// External wrench acting on the airframe.
struct ExternalWrench {
	Vec3 force{Vec3::Zero()};   // N, world
	Vec3 moment{Vec3::Zero()};  // N m, body
};

/// Translational and rotational accelerations for a given rotor input u:
/// m p̈ = −m g e3 + R(q) F1 u + d_f,  J ω̇ = −ω×Jω + F2 u + d_τ.
struct Accelerations {
	Vec3 linear;   // world
	Vec3 angular;  // body
};
Accelerations rigid_body_accelerations(const RigidBodyState &state, const PlatformParams &params,
				       const EffectivenessMatrices &eff, const RotorVec &applied_u,
				       const ExternalWrench &disturbance);

/// Full state derivative. Thrust comes from the current rotor speeds; the
/// rotors relax toward `w_cmd` with the first-order motor lag.
StateDerivative derivative(const RigidBodyState &state, const PlatformParams &params,
			   const EffectivenessMatrices &eff, const RotorVec &w_cmd,
			   const ExternalWrench &disturbance);

/// One RK4 step of length dt with the command and disturbance held.
/// Throws NonFiniteState if the result is not finite.
RigidBodyState step(const RigidBodyState &state, const PlatformParams &params,
		    const EffectivenessMatrices &eff, const ActuatorCommand &cmd,
		    const ExternalWrench &disturbance, double dt);

/// Level hover at `p` with rotors spinning at trim speed.
RigidBodyState hover_state(const PlatformParams &params, const EffectivenessMatrices &eff,
			   const Vec3 &p = Vec3::Zero());

enum class DisturbanceKind { none, constant_load, gust };

struct DisturbanceSpec {
	DisturbanceKind kind{DisturbanceKind::none};
	Vec3 force{Vec3::Zero()};   // N, world (mean force for gusts)
	Vec3 moment{Vec3::Zero()};  // N m, body
	double t_on{0.0};
	double t_off{0.0};
	double gust_std{0.0};        // N, stationary std of each lateral axis
	double gust_corr_time{1.0};  // s
	/// Centre of pressure relative to CoM (body); the gust force acting
	/// there adds lever_arm × force to the moment.
	Vec3 lever_arm{Vec3::Zero()};

	void validate() const;
};

/// Stateful disturbance source for one run. The gust is a mean force plus
/// Ornstein–Uhlenbeck noise on the two horizontal axes, discretized
/// exactly between consecutive sample times.
class DisturbanceModel {
public:
	explicit DisturbanceModel(DisturbanceSpec spec);

	ExternalWrench sample(double t, Rng &rng);
	const DisturbanceSpec &spec() const { return spec_; }

private:
	DisturbanceSpec spec_;
	Eigen::Vector2d colored_{Eigen::Vector2d::Zero()};
	double last_t_{0.0};
	bool started_{false};
};

/// Per-channel white noise. Standard deviations are the 1x level; the
/// applied std is sigma·sqrt(variance_scale).
struct NoiseSpec {
	double gyro_sigma{0.005};   // rad/s
	double accel_sigma{0.05};   // m/s^2
	double rotor_sigma{1.0};    // rad/s
	double variance_scale{0.0};
	bool gyro{true};
	bool accel{true};
	bool rotor{true};
};

struct SensorReadings {
	Vec3 accel{Vec3::Zero()};  // specific force, body, m/s^2
	Vec3 gyro{Vec3::Zero()};   // rad/s, body
	RotorVec rotor_w_meas{RotorVec::Zero()};
	Vec3 pose_p{Vec3::Zero()};
	UnitQuaternion pose_q;
	double timestamp{0.0};
};

/// accel = R(q)ᵀ(p̈ + g e3) + noise, gyro = ω + noise, rotor speeds +
/// noise, pose passed through.
SensorReadings synthesize_sensors(const RigidBodyState &state, const StateDerivative &deriv,
				  const NoiseSpec &noise, double t, Rng &rng);

} // namespace hexsim
