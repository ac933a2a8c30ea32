#pragma once

#include <stdexcept>
#include <string>

namespace fermat {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// point outside the declared box, or index non-positive there
class DomainError : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

// numerical precondition violated; the routine refuses to return a silently wrong value
class AccuracyError : public Error {
public:
    using Error::Error;
};

class SingularityError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

class NoSignalError : public Error {
public:
    using Error::Error;
};

// iterative method stopped without meeting its tolerance; residual() is the best value reached
class NoConvergenceError : public Error {
public:
    NoConvergenceError(const std::string& what, double residual) : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

class SolverError : public Error {
public:
    SolverError(const std::string& what, double condition_estimate)
        : Error(what), condition_estimate_(condition_estimate) {}
    double condition_estimate() const { return condition_estimate_; }

private:
    double condition_estimate_;
};

}  // namespace fermat
