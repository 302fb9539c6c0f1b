#pragma once

#include <Eigen/Core>

namespace hexsim {

struct FilterConfig {
	double natural_frequency{};  // rad/s
	double damping{};
	double sample_time{};        // s

	bool operator==(const FilterConfig &) const = default;
};

/// Multi-channel discrete second-order low-pass,
/// ω_n² / (s² + 2ζω_n s + ω_n²), bilinear transform prewarped at ω_n.
/// Unity DC gain. Direct form II transposed.
class SecondOrderFilter {
public:
	SecondOrderFilter(FilterConfig config, Eigen::Index channels);

	Eigen::VectorXd step(const Eigen::VectorXd &input);

	/// Puts every channel in steady state at `value`.
	void reset(const Eigen::VectorXd &value);

	const FilterConfig &config() const { return config_; }
	Eigen::Index channels() const { return s1_.size(); }
	const Eigen::VectorXd &output() const { return y_; }

	double b0() const { return b0_; }
	double b1() const { return b1_; }
	double b2() const { return b2_; }
	double a1() const { return a1_; }
	double a2() const { return a2_; }

private:
	FilterConfig config_;
	double b0_{}, b1_{}, b2_{}, a1_{}, a2_{};
	Eigen::VectorXd s1_, s2_, y_;
};

/// Backward difference (x_k − x_{k−1}) / T. Returns zero on the first call.
class FilteredDerivative {
public:
	FilteredDerivative(double sample_time, Eigen::Index channels);

	Eigen::VectorXd step(const Eigen::VectorXd &filtered_input);

	/// Seeds the previous sample so the next call differentiates against it.
	void prime(const Eigen::VectorXd &previous);

	double sample_time() const { return sample_time_; }

private:
	double sample_time_;
	Eigen::VectorXd previous_;
	bool primed_{false};
};

} // namespace hexsim
