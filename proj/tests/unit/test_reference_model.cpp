#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hexsim/reference_model.hpp"

using namespace hexsim;

namespace {

Vec3 body_rate_from_quaternions(const UnitQuaternion &a, const UnitQuaternion &b, double dt)
{
	// ω ≈ 2·vec(a⁻¹ ⊗ b) / dt for a short interval, evaluated at the midpoint.
	const UnitQuaternion d = quat_mul(a.inverse(), b);
	const double sign = d.w() < 0.0 ? -1.0 : 1.0;
	return 2.0 * sign * d.vec() / dt;
}

} // namespace

TEST(ReferenceModel, StartsAtRest)
{
	const ReferenceModel m({}, Vec3(0, 0, 1), Vec3(0.1, 0, 0));
	EXPECT_EQ(m.current().p, Vec3(0, 0, 1));
	EXPECT_EQ(m.current().v, Vec3::Zero());
	EXPECT_EQ(m.current().omega, Vec3::Zero());
	EXPECT_EQ(m.current().omega_dot, Vec3::Zero());
}

TEST(ReferenceModel, UpdateIndependentOfStepSize)
{
	ReferenceModel fine({}, Vec3::Zero(), Vec3::Zero());
	ReferenceModel coarse({}, Vec3::Zero(), Vec3::Zero());
	const Vec3 target_p(1.0, -2.0, 0.5), target_e(0.14, -0.1, 0.8);
	for (int i = 0; i < 10; ++i) {
		fine.update(target_p, target_e, 0.002);
	}
	coarse.update(target_p, target_e, 0.02);
	EXPECT_LT((fine.current().p - coarse.current().p).norm(), 1e-12);
	EXPECT_LT((fine.current().v - coarse.current().v).norm(), 1e-12);
	EXPECT_LT((fine.euler() - coarse.euler()).norm(), 1e-12);
}

TEST(ReferenceModel, CriticallyDampedStep)
{
	ShapingConfig cfg;
	ReferenceModel m(cfg, Vec3::Zero(), Vec3::Zero());
	const double dt = 0.002;
	double peak = 0.0;
	for (int i = 1; i <= 2000; ++i) {
		m.update(Vec3(1, 0, 0), Vec3::Zero(), dt);
		const double t = i * dt;
		const double wn = cfg.translation_wn;
		EXPECT_NEAR(m.current().p.x(), 1.0 - (1.0 + wn * t) * std::exp(-wn * t), 1e-12);
		peak = std::max(peak, m.current().p.x());
	}
	EXPECT_LE(peak, 1.0);
}

TEST(ReferenceModel, VelocityAndAccelerationAreConsistent)
{
	ReferenceModel m({}, Vec3::Zero(), Vec3::Zero());
	const double dt = 1e-4;
	m.update(Vec3(1, 2, 3), Vec3::Zero(), 0.1);
	const PoseReference a = m.current();
	m.update(Vec3(1, 2, 3), Vec3::Zero(), dt);
	const PoseReference b = m.current();
	EXPECT_LT(((b.p - a.p) / dt - 0.5 * (a.v + b.v)).norm(), 1e-6);
	// Trapezoid truncation error is O(dt²) times the third derivative.
	EXPECT_LT(((b.v - a.v) / dt - 0.5 * (a.a + b.a)).norm(), 1e-5);
}

TEST(ReferenceModel, BodyRatesMatchQuaternionKinematics)
{
	ReferenceModel m({}, Vec3::Zero(), Vec3(0.05, -0.03, 0.2));
	const Vec3 target(0.14, -0.14, 0.78);
	m.update(Vec3::Zero(), target, 0.05);
	const double dt = 1e-5;
	for (int i = 0; i < 5; ++i) {
		const PoseReference a = m.current();
		m.update(Vec3::Zero(), target, dt);
		const PoseReference b = m.current();
		const Vec3 w_fd = body_rate_from_quaternions(a.q, b.q, dt);
		EXPECT_LT((w_fd - 0.5 * (a.omega + b.omega)).norm(), 1e-6);
		EXPECT_LT(((b.omega - a.omega) / dt - 0.5 * (a.omega_dot + b.omega_dot)).norm(), 1e-4);
		m.update(Vec3::Zero(), target, 0.03);
	}
}

TEST(EulerKinematics, RandomRatesMatchFiniteDifference)
{
	std::mt19937_64 rng(1);
	std::uniform_real_distribution<double> u(-1.0, 1.0);
	for (int i = 0; i < 50; ++i) {
		const Vec3 e(u(rng), u(rng), 3.0 * u(rng)), r(u(rng), u(rng), u(rng)), acc(u(rng), u(rng), u(rng));
		const double h = 1e-6;
		// Euler angles advanced along (rate, accel) for ±h.
		auto at = [&](double t) {
			return Vec3(e + r * t + 0.5 * acc * t * t);
		};
		auto rate_at = [&](double t) {
			return Vec3(r + acc * t);
		};
		const UnitQuaternion q0 = UnitQuaternion::from_euler(at(-h).x(), at(-h).y(), at(-h).z());
		const UnitQuaternion q1 = UnitQuaternion::from_euler(at(h).x(), at(h).y(), at(h).z());
		EXPECT_LT((body_rate_from_quaternions(q0, q1, 2.0 * h) - euler_rates_to_body(e, r)).norm(), 1e-6);

		const Vec3 w0 = euler_rates_to_body(at(-h), rate_at(-h));
		const Vec3 w1 = euler_rates_to_body(at(h), rate_at(h));
		EXPECT_LT(((w1 - w0) / (2.0 * h) - euler_accel_to_body(e, r, acc)).norm(), 1e-6);
	}
}
