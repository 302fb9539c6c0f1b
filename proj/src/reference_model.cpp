#include "hexsim/reference_model.hpp"

#include <cmath>

namespace hexsim {

namespace {

struct AxisState {
	double x, v, a;
};

// Exact response of x'' = wn²(c − x) − 2 wn x' over dt with c held.
AxisState shape_axis(double x, double v, double c, double wn, double dt)
{
	const double e0 = x - c;
	const double b = v + wn * e0;
	const double decay = std::exp(-wn * dt);
	const double e = (e0 + b * dt) * decay;
	const double ve = (b - wn * (e0 + b * dt)) * decay;
	return {c + e, ve, -wn * wn * e - 2.0 * wn * ve};
}

} // namespace

Vec3 euler_rates_to_body(const Vec3 &euler, const Vec3 &rate)
{
	const double sr = std::sin(euler.x()), cr = std::cos(euler.x());
	const double sp = std::sin(euler.y()), cp = std::cos(euler.y());
	return {rate.x() - sp * rate.z(),
		cr * rate.y() + sr * cp * rate.z(),
		-sr * rate.y() + cr * cp * rate.z()};
}

Vec3 euler_accel_to_body(const Vec3 &euler, const Vec3 &rate, const Vec3 &accel)
{
	const double sr = std::sin(euler.x()), cr = std::cos(euler.x());
	const double sp = std::sin(euler.y()), cp = std::cos(euler.y());
	const double dr = rate.x(), dp = rate.y(), dy = rate.z();
	return {accel.x() - cp * dp * dy - sp * accel.z(),
		-sr * dr * dp + cr * accel.y() + cr * dr * cp * dy - sr * sp * dp * dy + sr * cp * accel.z(),
		-cr * dr * dp - sr * accel.y() - sr * dr * cp * dy - cr * sp * dp * dy + cr * cp * accel.z()};
}

ReferenceModel::ReferenceModel(ShapingConfig config, const Vec3 &position, const Vec3 &euler)
	: config_(config)
	, position_(position)
	, velocity_(Vec3::Zero())
	, acceleration_(Vec3::Zero())
	, euler_(euler)
	, euler_rate_(Vec3::Zero())
	, euler_accel_(Vec3::Zero())
{
	refresh();
}

const PoseReference &ReferenceModel::update(const Vec3 &target_position, const Vec3 &target_euler, double dt)
{
	for (int i = 0; i < 3; ++i) {
		const AxisState p = shape_axis(position_(i), velocity_(i), target_position(i), config_.translation_wn, dt);
		position_(i) = p.x;
		velocity_(i) = p.v;
		acceleration_(i) = p.a;

		const AxisState r = shape_axis(euler_(i), euler_rate_(i), target_euler(i), config_.attitude_wn, dt);
		euler_(i) = r.x;
		euler_rate_(i) = r.v;
		euler_accel_(i) = r.a;
	}
	refresh();
	return ref_;
}

void ReferenceModel::refresh()
{
	ref_.p = position_;
	ref_.v = velocity_;
	ref_.a = acceleration_;
	ref_.q = UnitQuaternion::from_euler(euler_.x(), euler_.y(), euler_.z());
	ref_.omega = euler_rates_to_body(euler_, euler_rate_);
	ref_.omega_dot = euler_accel_to_body(euler_, euler_rate_, euler_accel_);
}

} // namespace hexsim
