#pragma once

#include "hexsim/controllers.hpp"

namespace hexsim {

struct ShapingConfig {
	double translation_wn{4.0};  // rad/s
	double attitude_wn{12.0};    // rad/s
};

/// Critically damped second-order shaping of step setpoints, one axis per
/// position component and per Z-Y-X Euler angle. The update is the exact
/// solution for a command held over dt, so the shaped trajectory does not
/// depend on the controller rate.
class ReferenceModel {
public:
	ReferenceModel(ShapingConfig config, const Vec3 &position, const Vec3 &euler);

	/// Advances by dt toward the held targets and returns the new reference.
	const PoseReference &update(const Vec3 &target_position, const Vec3 &target_euler, double dt);

	const PoseReference &current() const { return ref_; }
	const Vec3 &euler() const { return euler_; }

private:
	void refresh();

	ShapingConfig config_;
	Vec3 position_, velocity_, acceleration_;
	Vec3 euler_, euler_rate_, euler_accel_;
	PoseReference ref_;
};

/// Body rate and its derivative for Z-Y-X Euler angles and their rates.
Vec3 euler_rates_to_body(const Vec3 &euler, const Vec3 &euler_rate);
Vec3 euler_accel_to_body(const Vec3 &euler, const Vec3 &euler_rate, const Vec3 &euler_accel);

} // namespace hexsim
