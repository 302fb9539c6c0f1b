#pragma once

#include <array>
#include <cstddef>

#include <Eigen/Core>
#include <Eigen/LU>

#include "hexsim/geometry.hpp"

namespace hexsim {

inline constexpr std::size_t kRotorCount = 6;

using RotorVec = Eigen::Matrix<double, 6, 1>;
using Mat36 = Eigen::Matrix<double, 3, 6>;

struct PlatformParams {
	double mass{};                 // kg
	Vec3 inertia_diag{Vec3::Zero()};  // kg m^2, principal axes
	double c_f{};                  // N/(rad/s)^2
	double c_tau{};                // N m/(rad/s)^2
	double arm_length{};           // m, centre to rotor shaft
	double tilt_angle{};           // rad, about each arm's radial axis
	std::array<Vec3, kRotorCount> rotor_positions{};
	std::array<double, kRotorCount> spin_dirs{};   // ±1, (-1)^(i-1) for rotor i = 1..6
	std::array<double, kRotorCount> tilt_signs{};  // ±1
	double w_min{};                // rad/s
	double w_max{};                // rad/s
	double motor_time_constant{};  // s
	/// Centre of mass relative to the geometric centre the rotor positions
	/// are measured from (body, m).
	Vec3 com_offset{Vec3::Zero()};

	Mat3 inertia() const { return inertia_diag.asDiagonal(); }

	/// Throws ConfigError when a structural invariant is broken. Rank is
	/// checked separately by build_effectiveness().
	void validate() const;
};

/// Places rotors at azimuth 60°·k, radius arm_length, with alternating
/// tilt sign and spin direction.
void apply_hex_layout(PlatformParams &params);

/// 2.95 kg hexarotor, 750 mm shaft-to-shaft, 30° tilt, 8–100 Hz rotors,
/// c_f sized for a thrust-to-weight ratio of 2.8 at w_max.
PlatformParams default_params();

/// Rotation from propeller frame P_i to body frame.
RotationMatrix rotor_to_body(const PlatformParams &params, std::size_t rotor);

struct RotorWrench {
	Vec3 force;   // N, propeller frame
	Vec3 torque;  // N m, propeller frame
};

/// Single-propeller force and drag torque for rotor index 0..5.
RotorWrench rotor_wrench(const PlatformParams &params, std::size_t rotor, double w);

struct EffectivenessMatrices {
	Mat36 F1;  // body-frame force per unit u
	Mat36 F2;  // body-frame torque per unit u
	Mat6 stacked;
	Mat6 stacked_inverse;
	double condition_number{};
};

/// Throws DegenerateGeometry if [F1; F2] is rank deficient.
EffectivenessMatrices build_effectiveness(const PlatformParams &params);

/// Rows 0-2: R(q)·F1 (world force), rows 3-5: F2 (body torque).
Mat6 assemble_F(const EffectivenessMatrices &eff, const UnitQuaternion &q);

/// Unsaturated u = F(q)⁻¹·wrench, wrench = [world force; body torque].
RotorVec solve_wrench(const EffectivenessMatrices &eff, const UnitQuaternion &q, const Vec6 &wrench);

struct ActuatorCommand {
	RotorVec u{RotorVec::Zero()};      // signed squared speeds after clamping, rad^2/s^2
	RotorVec w_cmd{RotorVec::Zero()};  // rad/s
	std::array<bool, kRotorCount> saturated{};

	unsigned saturation_mask() const;
	bool any_saturated() const { return saturation_mask() != 0; }
};

/// Clamps each u_i to [w_min², w_max²] and converts to speed setpoints.
ActuatorCommand saturate(const PlatformParams &params, const RotorVec &u_demand);

ActuatorCommand allocate(const PlatformParams &params, const EffectivenessMatrices &eff,
			 const UnitQuaternion &q, const Vec6 &wrench_demand);

/// Rotor input holding level hover at identity attitude (unclamped).
RotorVec hover_trim(const PlatformParams &params, const EffectivenessMatrices &eff);

} // namespace hexsim
