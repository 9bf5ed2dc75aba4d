#pragma once

#include <stdexcept>
#include <string>

namespace relsmooth {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point lies outside the domain of a reference function or objective.
class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A value lies outside the range of a gradient map being inverted.
class RangeError : public Error {
public:
    using Error::Error;
};

/// The mirror-step subproblem has no minimizer inside the feasible domain.
/// Usually means the stepsize parameter is below the smoothness certificate.
class StepOutOfDomain : public DomainError {
public:
    using DomainError::DomainError;
};

class CertificateError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class SingularError : public Error {
public:
    using Error::Error;
};

class OracleUnavailable : public Error {
public:
    using Error::Error;
};

class InvalidParams : public Error {
public:
    using Error::Error;
};

class MissingOptimum : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace relsmooth
