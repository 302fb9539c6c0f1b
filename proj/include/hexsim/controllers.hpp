#pragma once

#include <optional>
#include <string_view>

#include "hexsim/dynamics.hpp"
#include "hexsim/filters.hpp"
#include "hexsim/geometry.hpp"
#include "hexsim/platform.hpp"

namespace hexsim {

/// Diagonal gains shared by both inversion back-ends.
struct Gains {
	Vec3 k_p{Vec3::Constant(6.0)};   // 1/s^2
	Vec3 k_v{Vec3::Constant(4.0)};   // 1/s
	Vec3 k_q{Vec3::Constant(90.0)};  // 1/s^2
	Vec3 k_w{Vec3::Constant(18.0)};  // 1/s

	void validate() const;
};

struct PoseReference {
	Vec3 p{Vec3::Zero()};
	Vec3 v{Vec3::Zero()};
	Vec3 a{Vec3::Zero()};
	UnitQuaternion q;
	Vec3 omega{Vec3::Zero()};      // body of the desired frame
	Vec3 omega_dot{Vec3::Zero()};
};

/// Commanded translational (world) and angular (body) acceleration.
struct PseudoControl {
	Vec3 v_p{Vec3::Zero()};
	Vec3 v_att{Vec3::Zero()};
};

/// The pose/rate feedback a controller acts on.
struct StateView {
	Vec3 p{Vec3::Zero()};
	Vec3 v{Vec3::Zero()};
	UnitQuaternion q;
	Vec3 omega{Vec3::Zero()};
};

/// What the controller believes about the vehicle; may differ from the plant.
struct ControllerModel {
	PlatformParams params;
	EffectivenessMatrices eff;

	/// Copies `plant` with c_f scaled by `cf_scale` (c_tau unchanged).
	static ControllerModel from_plant(const PlatformParams &plant, double cf_scale = 1.0);
};

/// Shared outer loop. The attitude error is rotated into the body frame;
/// e_ω = ω − RᵀR_d ω_d enters with the damping sign.
PseudoControl outer_loop(const Gains &gains, const PoseReference &ref, const StateView &state);

/// Model-based inversion: [m̂(g e3 + v_p); ω×Ĵω + Ĵ v_att]. Feeding the
/// result to allocate() completes u = F̂(q)⁻¹(−f̂ + M̂ν).
Vec6 ndi_invert(const PseudoControl &nu, const StateView &state, const ControllerModel &model);

/// Filter bank behind the sensor-based inversion. Accelerometer, gyro and
/// rotor channels share one filter design so their delays match.
class IndiFeedback {
public:
	explicit IndiFeedback(const FilterConfig &config);

	struct Output {
		Vec3 accel_filtered;      // body specific force
		Vec3 omega_dot;           // derivative of filtered gyro
		RotorVec u0;              // filtered measured w|w|
	};

	Output step(const SensorReadings &sensors);

	/// Steady state at the given readings (zero angular acceleration).
	void warm_start(const SensorReadings &sensors);

	bool synchronized() const;

private:
	SecondOrderFilter accel_;
	SecondOrderFilter gyro_;
	SecondOrderFilter rotor_;
	FilteredDerivative gyro_rate_;
};

/// Incremental inversion: u = F̂(q)⁻¹ M̂ (ν − ẏ0) + u0 with
/// ẏ0 = [R(q)·a_f − g e3; ω̇_f]. Returns the unclamped input.
RotorVec indi_invert(const PseudoControl &nu, const IndiFeedback::Output &feedback,
		     const UnitQuaternion &q, const ControllerModel &model);

enum class ControllerKind { geo, indi };

std::string_view to_string(ControllerKind kind);
std::optional<ControllerKind> controller_kind_from_string(std::string_view name);

/// One controller instance: outer loop feeding either inversion, then
/// saturation/allocation. Owns its filter state.
class Controller {
public:
	Controller(ControllerKind kind, Gains gains, ControllerModel model, const FilterConfig &filter);

	/// Initializes internal filters at the hover readings.
	void warm_start(const SensorReadings &sensors);

	ActuatorCommand tick(const PoseReference &ref, const StateView &state, const SensorReadings &sensors);

	ControllerKind kind() const { return kind_; }
	const Gains &gains() const { return gains_; }
	const ControllerModel &model() const { return model_; }
	const PseudoControl &last_pseudo_control() const { return last_nu_; }
	const RotorVec &last_demand() const { return last_demand_; }

private:
	ControllerKind kind_;
	Gains gains_;
	ControllerModel model_;
	IndiFeedback feedback_;
	PseudoControl last_nu_;
	RotorVec last_demand_{RotorVec::Zero()};
};

} // namespace hexsim
