#include "hexsim/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace hexsim {

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z)
	: q_(w, x, y, z)
{
	q_.normalize();
}

UnitQuaternion::UnitQuaternion(const Eigen::Quaterniond &q)
	: q_(q)
{
	q_.normalize();
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3 &axis, double angle)
{
	return UnitQuaternion(Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis.normalized())));
}

UnitQuaternion UnitQuaternion::from_euler(double roll, double pitch, double yaw)
{
	const Eigen::Quaterniond q = Eigen::AngleAxisd(yaw, Vec3::UnitZ())
				     * Eigen::AngleAxisd(pitch, Vec3::UnitY())
				     * Eigen::AngleAxisd(roll, Vec3::UnitX());
	return UnitQuaternion(q);
}

Vec3 UnitQuaternion::to_euler() const
{
	const double w = q_.w(), x = q_.x(), y = q_.y(), z = q_.z();
	const double roll = std::atan2(2.0 * (w * x + y * z), 1.0 - 2.0 * (x * x + y * y));
	const double sp = std::clamp(2.0 * (w * y - z * x), -1.0, 1.0);
	const double pitch = std::asin(sp);
	const double yaw = std::atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z));
	return {roll, pitch, yaw};
}

RotationMatrix quat_to_rotmat(const UnitQuaternion &q)
{
	return q.eigen().toRotationMatrix();
}

UnitQuaternion quat_mul(const UnitQuaternion &a, const UnitQuaternion &b)
{
	return UnitQuaternion(a.eigen() * b.eigen());
}

Vec3 attitude_error_vector(const UnitQuaternion &q_d, const UnitQuaternion &q_b)
{
	const Eigen::Quaterniond e = q_d.eigen() * q_b.eigen().conjugate();
	// η = 0 is a measure-zero set; pick +1 there so the result stays bounded.
	const double sign = e.w() < 0.0 ? -1.0 : 1.0;
	return 2.0 * sign * e.vec();
}

Vec3 angular_rate_error(const Vec3 &omega_b, const Vec3 &omega_d,
			const UnitQuaternion &q_b, const UnitQuaternion &q_d)
{
	return omega_b - quat_to_rotmat(q_b).transpose() * quat_to_rotmat(q_d) * omega_d;
}

bool all_finite(const Vec3 &v)
{
	return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

} // namespace hexsim
