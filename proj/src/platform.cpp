#include "hexsim/platform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SVD>

#include "hexsim/errors.hpp"

namespace hexsim {

namespace {

// Smallest singular value relative to the largest below which [F1; F2]
// is treated as rank deficient.
constexpr double kRankTolerance = 1e-9;

} // namespace

void PlatformParams::validate() const
{
	if (!(mass > 0.0)) {
		throw ConfigError("mass must be positive");
	}
	if (!(inertia_diag.minCoeff() > 0.0)) {
		throw ConfigError("inertia must be positive definite");
	}
	if (!(c_f > 0.0) || !(c_tau >= 0.0)) {
		throw ConfigError("rotor coefficients must be positive");
	}
	if (!(arm_length > 0.0)) {
		throw ConfigError("arm_length must be positive");
	}
	if (!(w_min > 0.0 && w_min < w_max)) {
		throw ConfigError("rotor limits must satisfy 0 < w_min < w_max");
	}
	if (!(std::abs(tilt_angle) < std::numbers::pi / 2.0)) {
		throw ConfigError("|tilt_angle| must be below 90 deg");
	}
	if (!(motor_time_constant > 0.0)) {
		throw ConfigError("motor_time_constant must be positive");
	}
}

void apply_hex_layout(PlatformParams &params)
{
	for (std::size_t k = 0; k < kRotorCount; ++k) {
		const double azimuth = std::numbers::pi / 3.0 * static_cast<double>(k);
		params.rotor_positions[k] = params.arm_length * Vec3(std::cos(azimuth), std::sin(azimuth), 0.0);
		params.spin_dirs[k] = (k % 2 == 0) ? 1.0 : -1.0;
		params.tilt_signs[k] = (k % 2 == 0) ? 1.0 : -1.0;
	}
}

PlatformParams default_params()
{
	PlatformParams p;
	p.mass = 2.95;
	p.inertia_diag = Vec3(0.08, 0.08, 0.14);
	p.arm_length = 0.375;
	p.tilt_angle = 30.0 * std::numbers::pi / 180.0;
	p.w_min = 2.0 * std::numbers::pi * 8.0;
	p.w_max = 2.0 * std::numbers::pi * 100.0;
	p.motor_time_constant = 0.03;

	constexpr double thrust_to_weight = 2.8;
	p.c_f = thrust_to_weight * p.mass * kGravity
		/ (static_cast<double>(kRotorCount) * p.w_max * p.w_max * std::cos(p.tilt_angle));
	p.c_tau = 0.016 * p.c_f;

	apply_hex_layout(p);
	return p;
}

RotationMatrix rotor_to_body(const PlatformParams &params, std::size_t rotor)
{
	const double azimuth = std::atan2(params.rotor_positions[rotor].y(), params.rotor_positions[rotor].x());
	const Eigen::AngleAxisd yaw(azimuth, Vec3::UnitZ());
	const Eigen::AngleAxisd cant(params.tilt_signs[rotor] * params.tilt_angle, Vec3::UnitX());
	return (yaw * cant).toRotationMatrix();
}

RotorWrench rotor_wrench(const PlatformParams &params, std::size_t rotor, double w)
{
	const double u = w * std::abs(w);
	return {params.c_f * u * e3(), params.spin_dirs[rotor] * params.c_tau * u * e3()};
}

EffectivenessMatrices build_effectiveness(const PlatformParams &params)
{
	EffectivenessMatrices eff;
	for (std::size_t i = 0; i < kRotorCount; ++i) {
		const RotationMatrix r = rotor_to_body(params, i);
		const Vec3 thrust = r * (params.c_f * e3());
		const Vec3 drag = r * (params.spin_dirs[i] * params.c_tau * e3());
		eff.F1.col(static_cast<Eigen::Index>(i)) = thrust;
		eff.F2.col(static_cast<Eigen::Index>(i)) = (params.rotor_positions[i] - params.com_offset).cross(thrust) + drag;
	}
	eff.stacked << eff.F1, eff.F2;

	const Eigen::JacobiSVD<Mat6> svd(eff.stacked);
	const auto &sv = svd.singularValues();
	const double smax = sv(0);
	const double smin = sv(5);
	if (!(smax > 0.0) || smin < kRankTolerance * smax) {
		int rank = 0;
		for (Eigen::Index k = 0; k < sv.size(); ++k) {
			rank += sv(k) >= kRankTolerance * smax ? 1 : 0;
		}
		std::ostringstream msg;
		msg << "effectiveness matrix has rank " << rank << " < 6 (tilt "
		    << params.tilt_angle * 180.0 / std::numbers::pi << " deg)";
		throw DegenerateGeometry(msg.str());
	}
	eff.condition_number = smax / smin;
	eff.stacked_inverse = eff.stacked.fullPivLu().inverse();
	return eff;
}

Mat6 assemble_F(const EffectivenessMatrices &eff, const UnitQuaternion &q)
{
	Mat6 f;
	f << quat_to_rotmat(q) * eff.F1, eff.F2;
	return f;
}

RotorVec solve_wrench(const EffectivenessMatrices &eff, const UnitQuaternion &q, const Vec6 &wrench)
{
	// F(q) = blkdiag(R, I)·[F1; F2], so F(q)⁻¹ = [F1; F2]⁻¹·blkdiag(Rᵀ, I).
	Vec6 body;
	body.head<3>() = quat_to_rotmat(q).transpose() * wrench.head<3>();
	body.tail<3>() = wrench.tail<3>();
	return eff.stacked_inverse * body;
}

unsigned ActuatorCommand::saturation_mask() const
{
	unsigned mask = 0;
	for (std::size_t i = 0; i < kRotorCount; ++i) {
		if (saturated[i]) {
			mask |= 1u << i;
		}
	}
	return mask;
}

ActuatorCommand saturate(const PlatformParams &params, const RotorVec &u_demand)
{
	const double u_min = params.w_min * params.w_min;
	const double u_max = params.w_max * params.w_max;
	ActuatorCommand cmd;
	for (Eigen::Index i = 0; i < 6; ++i) {
		const double clamped = std::clamp(u_demand(i), u_min, u_max);
		cmd.saturated[static_cast<std::size_t>(i)] = clamped != u_demand(i);
		cmd.u(i) = clamped;
		cmd.w_cmd(i) = std::sqrt(clamped);
	}
	return cmd;
}

ActuatorCommand allocate(const PlatformParams &params, const EffectivenessMatrices &eff,
			 const UnitQuaternion &q, const Vec6 &wrench_demand)
{
	return saturate(params, solve_wrench(eff, q, wrench_demand));
}

RotorVec hover_trim(const PlatformParams &params, const EffectivenessMatrices &eff)
{
	Vec6 wrench = Vec6::Zero();
	wrench(2) = params.mass * kGravity;
	return solve_wrench(eff, UnitQuaternion::identity(), wrench);
}

} // namespace hexsim
