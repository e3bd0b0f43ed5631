#pragma once

#include <stdexcept>
#include <string>

namespace eigenfem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Malformed or geometrically invalid mesh files.
class IngestionError : public Error {
public:
    using Error::Error;
};

/// Diffusion not symmetric positive definite at a sample point, or an unknown problem.
class CoefficientError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

} // namespace eigenfem
