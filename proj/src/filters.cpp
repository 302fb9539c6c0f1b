#include "hexsim/filters.hpp"

#include <cmath>
#include <numbers>

#include "hexsim/errors.hpp"

namespace hexsim {

SecondOrderFilter::SecondOrderFilter(FilterConfig config, Eigen::Index channels)
	: config_(config)
	, s1_(Eigen::VectorXd::Zero(channels))
	, s2_(Eigen::VectorXd::Zero(channels))
	, y_(Eigen::VectorXd::Zero(channels))
{
	const double wn = config_.natural_frequency;
	const double zeta = config_.damping;
	const double ts = config_.sample_time;
	if (!(wn > 0.0) || !(zeta > 0.0 && zeta <= 2.0) || !(ts > 0.0)) {
		throw ConfigError("filter requires natural_frequency > 0, 0 < damping <= 2, sample_time > 0");
	}
	if (!(wn * ts < std::numbers::pi)) {
		throw ConfigError("filter natural frequency must lie below the Nyquist frequency");
	}

	const double omega = std::tan(wn * ts / 2.0);
	const double omega2 = omega * omega;
	const double a0 = 1.0 + 2.0 * zeta * omega + omega2;
	b0_ = omega2 / a0;
	b1_ = 2.0 * b0_;
	b2_ = b0_;
	a1_ = 2.0 * (omega2 - 1.0) / a0;
	a2_ = (1.0 - 2.0 * zeta * omega + omega2) / a0;
}

Eigen::VectorXd SecondOrderFilter::step(const Eigen::VectorXd &input)
{
	y_ = b0_ * input + s1_;
	s1_ = b1_ * input - a1_ * y_ + s2_;
	s2_ = b2_ * input - a2_ * y_;
	return y_;
}

void SecondOrderFilter::reset(const Eigen::VectorXd &value)
{
	s2_ = (b2_ - a2_) * value;
	s1_ = (b1_ - a1_) * value + s2_;
	y_ = value;
}

FilteredDerivative::FilteredDerivative(double sample_time, Eigen::Index channels)
	: sample_time_(sample_time)
	, previous_(Eigen::VectorXd::Zero(channels))
{
	if (!(sample_time > 0.0)) {
		throw ConfigError("derivative sample_time must be positive");
	}
}

Eigen::VectorXd FilteredDerivative::step(const Eigen::VectorXd &filtered_input)
{
	Eigen::VectorXd out = Eigen::VectorXd::Zero(filtered_input.size());
	if (primed_) {
		out = (filtered_input - previous_) / sample_time_;
	}
	previous_ = filtered_input;
	primed_ = true;
	return out;
}

void FilteredDerivative::prime(const Eigen::VectorXd &previous)
{
	previous_ = previous;
	primed_ = true;
}

} // namespace hexsim
