#pragma once

#include <stdexcept>
#include <string>

namespace magflow {

/// Base for every error raised by the library. Carries a process exit code
/// so the command-line front end can map failures without RTTI ladders.
class Error : public std::runtime_error {
public:
    Error(const std::string& what, int exit_code)
        : std::runtime_error(what), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

// Domain and regime errors (exit code 2).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what, 2) {}
};

class DegenerateCurve : public DomainError {
public:
    explicit DegenerateCurve(const std::string& what) : DomainError(what) {}
};

class UnsupportedRegime : public DomainError {
public:
    explicit UnsupportedRegime(const std::string& what) : DomainError(what) {}
};

class WrongRegime : public DomainError {
public:
    explicit WrongRegime(const std::string& what) : DomainError(what) {}
};

class OpenCurve : public DomainError {
public:
    explicit OpenCurve(const std::string& what) : DomainError(what) {}
};

// Numeric failures (exit code 3).
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(what, 3) {}
};

class ReductionInconsistency : public NumericError {
public:
    explicit ReductionInconsistency(const std::string& what) : NumericError(what) {}
};

class StepFailure : public NumericError {
public:
    StepFailure(const std::string& what, double t) : NumericError(what), t_(t) {}
    /// Time at which the step size underflowed.
    double time() const noexcept { return t_; }

private:
    double t_;
};

class NoReturnFound : public NumericError {
public:
    explicit NoReturnFound(const std::string& what) : NumericError(what) {}
};

}  // namespace magflow
