#pragma once

#include <stdexcept>
#include <string>

namespace squeeze {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid physical or numerical input.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A sampled mode density does not integrate to one.
class NormalizationError : public Error {
public:
    NormalizationError(const std::string& what, double norm) : Error(what), norm_(norm) {}
    double norm() const noexcept { return norm_; }

private:
    double norm_;
};

/// Quadrature, root finding or iteration failed to reach its tolerance.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double achieved) : Error(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// A truncated Fock space is too small for the requested state.
class CutoffError : public Error {
public:
    CutoffError(const std::string& what, int required) : Error(what), required_(required) {}
    int required_cutoff() const noexcept { return required_; }

private:
    int required_;
};

/// Field integration produced non-finite values.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Malformed or schema-violating run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure while writing results.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace squeeze
