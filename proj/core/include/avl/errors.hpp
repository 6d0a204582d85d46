#pragma once

#include <stdexcept>
#include <string>

namespace avl {

/// Base class for all library-specific failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateGeometryError : public Error {
public:
    using Error::Error;
};

/// Spheres have no real intersection; carries the best-achievable residual.
class NoSolutionError : public Error {
public:
    NoSolutionError(const std::string& what, double residual_km)
        : Error(what), residual_km(residual_km) {}
    double residual_km;
};

class NonConvergenceError : public Error {
public:
    using Error::Error;
};

class StaleEphemerisError : public Error {
public:
    using Error::Error;
};

class UnhealthySatelliteError : public Error {
public:
    using Error::Error;
};

class NoLockError : public Error {
public:
    using Error::Error;
};

class CrcError : public Error {
public:
    using Error::Error;
};

class EncodingError : public Error {
public:
    using Error::Error;
};

class StaleCorrectionError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

}  // namespace avl
