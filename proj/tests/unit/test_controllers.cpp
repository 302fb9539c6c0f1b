#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hexsim/controllers.hpp"
#include "hexsim/errors.hpp"
#include "hexsim/experiments.hpp"

using namespace hexsim;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

FilterConfig filter500()
{
	return {2.0 * std::numbers::pi * 15.0, 0.7, 1.0 / 500.0};
}

PoseReference hover_ref(const Vec3 &p = Vec3(0, 0, 1))
{
	PoseReference r;
	r.p = p;
	return r;
}

// Truth-feedback closed loop at 2 kHz with the controller at 500 Hz.
struct Loop {
	PlatformParams plant{default_params()};
	EffectivenessMatrices eff{build_effectiveness(plant)};
	RigidBodyState state;
	Controller controller;
	ActuatorCommand cmd;

	Loop(ControllerKind kind, const ControllerModel &model, const Vec3 &p0 = Vec3(0, 0, 1))
		: state(hover_state(plant, eff, p0))
		, controller(kind, Gains{}, model, filter500())
	{
		controller.warm_start(read());
		cmd = saturate(plant, state.rotor_w.cwiseProduct(state.rotor_w));
	}

	SensorReadings read() const
	{
		Rng rng(0);
		return synthesize_sensors(state, derivative(state, plant, eff, cmd.w_cmd, {}), NoiseSpec{}, 0.0, rng);
	}

	void run(const PoseReference &ref, double seconds)
	{
		const int ticks = static_cast<int>(std::lround(seconds * 500.0));
		for (int k = 0; k < ticks; ++k) {
			cmd = controller.tick(ref, {state.p, state.v, state.q, state.omega}, read());
			for (int s = 0; s < 4; ++s) {
				state = step(state, plant, eff, cmd, {}, 5e-4);
			}
		}
	}
};

} // namespace

TEST(OuterLoop, ZeroErrorZeroFeedforward)
{
	const PseudoControl nu = outer_loop(Gains{}, hover_ref(), {Vec3(0, 0, 1), Vec3::Zero(), {}, Vec3::Zero()});
	EXPECT_EQ(nu.v_p, Vec3::Zero());
	EXPECT_EQ(nu.v_att, Vec3::Zero());
}

TEST(OuterLoop, PositionGain)
{
	const PseudoControl nu = outer_loop(Gains{}, hover_ref(Vec3(1, 0, 0)), {});
	EXPECT_LT((nu.v_p - Vec3(6, 0, 0)).norm(), 1e-15);
}

TEST(OuterLoop, RollErrorThroughAttitudeGain)
{
	Gains g;
	g.k_q = Vec3::Constant(100.0);
	PoseReference ref;
	ref.q = UnitQuaternion::from_euler(8.0 * kDeg, 0.0, 0.0);
	const PseudoControl nu = outer_loop(g, ref, {});
	EXPECT_NEAR(nu.v_att.x(), 100.0 * 2.0 * std::sin(4.0 * kDeg), 1e-12);
	EXPECT_NEAR(nu.v_att.x(), 13.95, 0.005);
	EXPECT_NEAR(nu.v_att.y(), 0.0, 1e-12);
	EXPECT_NEAR(nu.v_att.z(), 0.0, 1e-12);
}

TEST(OuterLoop, RateErrorIsDamping)
{
	const PseudoControl nu = outer_loop(Gains{}, hover_ref(Vec3::Zero()), {Vec3::Zero(), Vec3::Zero(), {}, Vec3(1, 0, 0)});
	EXPECT_LT((nu.v_att - Vec3(-18, 0, 0)).norm(), 1e-12);
}

TEST(NdiInvert, HoverCancelsGravity)
{
	const ControllerModel model = ControllerModel::from_plant(default_params());
	const Vec6 w = ndi_invert({}, {}, model);
	EXPECT_NEAR(w(2), 2.95 * 9.81, 1e-12);
	EXPECT_LT((w - Vec6(0, 0, w(2), 0, 0, 0)).norm(), 1e-15);

	PseudoControl nu;
	nu.v_p = Vec3(0, 0, 1);
	EXPECT_NEAR(ndi_invert(nu, {}, model)(2), 2.95 * 10.81, 1e-12);
}

TEST(NdiInvert, GyroscopicTermVanishesForSymmetricYawSpin)
{
	const ControllerModel model = ControllerModel::from_plant(default_params());
	StateView spinning;
	spinning.omega = Vec3(0, 0, 1);
	EXPECT_LT(ndi_invert({}, spinning, model).tail<3>().norm(), 1e-15);

	StateView tumbling;
	tumbling.omega = Vec3(1, 0, 1);
	const Mat3 j = model.params.inertia();
	EXPECT_LT((ndi_invert({}, tumbling, model).tail<3>() - tumbling.omega.cross(j * tumbling.omega)).norm(), 1e-15);
}

TEST(IndiInvert, FixedPointReturnsU0)
{
	const ControllerModel model = ControllerModel::from_plant(default_params());
	PseudoControl nu;
	nu.v_p = Vec3(0.3, -0.2, 0.5);
	nu.v_att = Vec3(1.0, 2.0, -0.5);
	const UnitQuaternion q = UnitQuaternion::from_euler(0.1, -0.2, 0.3);
	IndiFeedback::Output fb;
	fb.accel_filtered = quat_to_rotmat(q).transpose() * (nu.v_p + kGravity * e3());
	fb.omega_dot = nu.v_att;
	fb.u0 = RotorVec::LinSpaced(6, 1e5, 2e5);
	EXPECT_LT((indi_invert(nu, fb, q, model) - fb.u0).norm(), 1e-6);
}

TEST(IndiFeedback, WarmStartUsesMeasuredRotorSpeeds)
{
	IndiFeedback fb(filter500());
	EXPECT_TRUE(fb.synchronized());
	SensorReadings s;
	s.accel = Vec3(0, 0, 9.81);
	s.rotor_w_meas = RotorVec::Constant(600.0);
	fb.warm_start(s);
	const IndiFeedback::Output out = fb.step(s);
	EXPECT_LT((out.u0 - RotorVec::Constant(360000.0)).norm(), 1e-6);
	EXPECT_LT(out.omega_dot.norm(), 1e-12);
	EXPECT_LT((out.accel_filtered - s.accel).norm(), 1e-12);
}

TEST(Controller, HoverCommandsTrimForBoth)
{
	const PlatformParams p = default_params();
	const RotorVec trim = hover_trim(p, build_effectiveness(p));
	for (ControllerKind kind : {ControllerKind::geo, ControllerKind::indi}) {
		Loop loop(kind, ControllerModel::from_plant(p));
		loop.run(hover_ref(), 0.5);
		EXPECT_LT((loop.cmd.u - trim).cwiseAbs().maxCoeff() / trim.maxCoeff(), 1e-6) << to_string(kind);
	}
}

TEST(Controller, IndiMatchesNdiAtEquilibrium)
{
	const ControllerModel model = ControllerModel::from_plant(default_params());
	Loop geo(ControllerKind::geo, model), indi(ControllerKind::indi, model);
	geo.run(hover_ref(), 1.0);
	indi.run(hover_ref(), 1.0);
	EXPECT_LT((geo.cmd.u - indi.cmd.u).cwiseAbs().maxCoeff() / geo.cmd.u.cwiseAbs().maxCoeff(), 0.01);
}

TEST(Controller, IndiToleratesDoubledMassModel)
{
	PlatformParams wrong = default_params();
	wrong.mass *= 2.0;
	Loop loop(ControllerKind::indi, ControllerModel::from_plant(wrong), Vec3(0, 0, 0.8));
	loop.run(hover_ref(), 6.0);
	EXPECT_LT((loop.state.p - Vec3(0, 0, 1)).norm(), 1e-3);
	const StateDerivative d = derivative(loop.state, loop.plant, loop.eff, loop.cmd.w_cmd, {});
	EXPECT_LT(d.v_dot.norm(), 1e-2);
}

TEST(Controller, CfMismatchAltitudeErrorDirection)
{
	PlatformParams half = default_params();
	half.c_f *= 0.5;
	const ControllerModel model = ControllerModel::from_plant(default_params(), 0.5);
	EXPECT_DOUBLE_EQ(model.params.c_f, half.c_f);

	Loop geo(ControllerKind::geo, model), indi(ControllerKind::indi, model);
	geo.run(hover_ref(), 5.0);
	indi.run(hover_ref(), 5.0);
	// The GEO model under-predicts thrust, so it climbs until k_p·e_p balances.
	EXPECT_GT(geo.state.p.z() - 1.0, 0.5);
	EXPECT_LT(std::abs(indi.state.p.z() - 1.0), 0.01);
}

TEST(Controller, PureWithRespectToState)
{
	const ControllerModel model = ControllerModel::from_plant(default_params());
	Controller a(ControllerKind::indi, Gains{}, model, filter500());
	Controller b(ControllerKind::indi, Gains{}, model, filter500());
	SensorReadings s;
	s.accel = Vec3(0.1, 0.0, 9.7);
	s.gyro = Vec3(0.01, -0.02, 0.0);
	s.rotor_w_meas = RotorVec::Constant(380.0);
	a.warm_start(s);
	b.warm_start(s);
	PoseReference ref = hover_ref();
	for (int i = 0; i < 50; ++i) {
		s.gyro *= 1.01;
		const StateView v{Vec3(0, 0, 0.99), Vec3::Zero(), {}, s.gyro};
		EXPECT_EQ(a.tick(ref, v, s).u, b.tick(ref, v, s).u);
	}
}

TEST(Controller, SaturatedCommandsStayInLimits)
{
	const PlatformParams p = default_params();
	Controller c(ControllerKind::geo, Gains{}, ControllerModel::from_plant(p), filter500());
	const ActuatorCommand cmd = c.tick(hover_ref(Vec3(0, 0, 100)), {}, {});
	EXPECT_TRUE(cmd.any_saturated());
	EXPECT_LE(cmd.w_cmd.maxCoeff(), p.w_max);
	EXPECT_GE(cmd.w_cmd.minCoeff(), p.w_min);
}

TEST(Gains, RejectNonPositive)
{
	Gains g;
	g.k_v.y() = 0.0;
	EXPECT_THROW(g.validate(), ConfigError);
	EXPECT_THROW(ControllerModel::from_plant(default_params(), 0.0), ConfigError);
}

TEST(ControllerKind, Names)
{
	EXPECT_EQ(controller_kind_from_string("geo"), ControllerKind::geo);
	EXPECT_EQ(controller_kind_from_string("ndi"), ControllerKind::geo);
	EXPECT_EQ(controller_kind_from_string("indi"), ControllerKind::indi);
	EXPECT_FALSE(controller_kind_from_string("pid"));
}
