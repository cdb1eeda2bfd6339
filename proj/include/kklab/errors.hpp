#pragma once

#include <stdexcept>
#include <string>

namespace kklab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite or otherwise malformed argument.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation (e.g. k < 0 where
/// the amplitude k^{3/2} must be real).
class DomainError : public Error {
public:
    using Error::Error;
};

class UnsupportedOrder : public Error {
public:
    using Error::Error;
};

/// A time-dependent solve produced non-finite values. Carries the time of the
/// last valid state.
class DivergedState : public Error {
public:
    DivergedState(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// ODE solution left the representable range; `time_estimate` brackets the
/// blow-up time from below.
class Blowup : public Error {
public:
    Blowup(const std::string& what, double time_estimate)
        : Error(what), time_estimate_(time_estimate) {}
    double time_estimate() const noexcept { return time_estimate_; }

private:
    double time_estimate_;
};

class FiniteTimeSingularity : public Error {
public:
    using Error::Error;
};

class SingularScaling : public Error {
public:
    using Error::Error;
};

class PoleError : public Error {
public:
    using Error::Error;
};

class DegenerateEnsemble : public Error {
public:
    using Error::Error;
};

}  // namespace kklab
