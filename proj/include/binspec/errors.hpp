#pragma once

#include <stdexcept>
#include <string>

namespace binspec {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input: malformed scenario, out-of-range index, non-positive power, ...
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A numerical routine could not deliver its contract (factorization, quadrature, singular Fisher).
class NumericalError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularFisherError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace binspec
