#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hexsim {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using RotationMatrix = Eigen::Matrix3d;

inline constexpr double kGravity = 9.81;  // m/s^2, world z up

inline Vec3 e3() { return Vec3::UnitZ(); }

/// Unit quaternion, Hamilton convention (w first), rotating body -> world.
/// Every constructor and producing operation renormalizes.
class UnitQuaternion {
public:
	UnitQuaternion() : q_(Eigen::Quaterniond::Identity()) {}
	UnitQuaternion(double w, double x, double y, double z);
	explicit UnitQuaternion(const Eigen::Quaterniond &q);

	static UnitQuaternion identity() { return {}; }
	static UnitQuaternion from_axis_angle(const Vec3 &axis, double angle);
	/// Intrinsic Z-Y-X (yaw, pitch, roll) Euler angles in rad.
	static UnitQuaternion from_euler(double roll, double pitch, double yaw);

	double w() const { return q_.w(); }
	double x() const { return q_.x(); }
	double y() const { return q_.y(); }
	double z() const { return q_.z(); }
	Vec3 vec() const { return q_.vec(); }

	UnitQuaternion inverse() const { return UnitQuaternion(q_.conjugate()); }
	UnitQuaternion operator-() const { return {-w(), -x(), -y(), -z()}; }

	/// Roll, pitch, yaw (Z-Y-X) in rad.
	Vec3 to_euler() const;

	const Eigen::Quaterniond &eigen() const { return q_; }

private:
	Eigen::Quaterniond q_;
};

RotationMatrix quat_to_rotmat(const UnitQuaternion &q);

/// Hamilton product a ⊗ b, renormalized.
UnitQuaternion quat_mul(const UnitQuaternion &a, const UnitQuaternion &b);

/// Shortest-path attitude error of q_d relative to q_b: 2·sign(η)·ε of
/// q_d ⊗ q_b⁻¹ (world frame). Zero iff the attitudes agree up to sign.
Vec3 attitude_error_vector(const UnitQuaternion &q_d, const UnitQuaternion &q_b);

/// ω_b − R(q_b)ᵀ R(q_d) ω_d, body frame.
Vec3 angular_rate_error(const Vec3 &omega_b, const Vec3 &omega_d,
			const UnitQuaternion &q_b, const UnitQuaternion &q_d);

inline Mat3 skew(const Vec3 &v)
{
	Mat3 s;
	s << 0.0, -v.z(), v.y(),
	     v.z(), 0.0, -v.x(),
	     -v.y(), v.x(), 0.0;
	return s;
}

bool all_finite(const Vec3 &v);

} // namespace hexsim
