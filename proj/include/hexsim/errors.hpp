#pragma once

#include <stdexcept>
#include <string>

namespace hexsim {

class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

/// Rotor layout does not span all six wrench directions.
class DegenerateGeometry : public Error {
public:
	using Error::Error;
};

/// Simulation state diverged (NaN/inf).
class NonFiniteState : public Error {
public:
	using Error::Error;
};

class UnknownScenario : public Error {
public:
	using Error::Error;
};

/// Step response never reached 90 % of the commanded magnitude.
class NotReached : public Error {
public:
	using Error::Error;
};

class EmptyWindow : public Error {
public:
	using Error::Error;
};

/// Config parse/validation failure. `line` is 0 when not tied to a line.
class ConfigError : public Error {
public:
	ConfigError(const std::string &msg, int line = 0)
		: Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
	int line() const { return line_; }

private:
	int line_;
};

class IoError : public Error {
public:
	using Error::Error;
};

} // namespace hexsim
