// errors.hpp - exception types shared by every clbattery module
#pragma once

#include <stdexcept>
#include <string>

namespace clbattery {

// Base class; catch this to handle any library failure.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input values (negative frequency, unphysical parameter, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class NegativeFrequency : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class PoleAtBoundary : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class NotPositiveDefinite : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class UnphysicalCovariance : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

// Numerical failures. The CLI maps these to exit code 2.
class NumericalError : public Error {
public:
    using Error::Error;
};

class NonFiniteIntegrand : public NumericalError {
public:
    NonFiniteIntegrand(const std::string& what, double where)
        : NumericalError(what), where_(where) {}
    double where() const noexcept { return where_; }

private:
    double where_;
};

class DivergentRenormalization : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ZeroDenominator : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class UnknownAsymptote : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace clbattery
