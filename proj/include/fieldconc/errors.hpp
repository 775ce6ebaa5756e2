#pragma once

#include <stdexcept>
#include <string>

namespace fc {

// Base class; every library failure derives from it so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside an operation's documented domain.
class DomainError : public Error {
public:
    using Error::Error;
};

// Result not representable in double precision (overflow or underflow).
class OutOfRangeError : public Error {
public:
    using Error::Error;
};

// Iterative method exhausted its budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Normalization impossible because the interior trace vanishes at the root.
class DegenerateModeError : public Error {
public:
    using Error::Error;
};

// Geometry sampling or mask construction produced too few points.
class GeometryError : public Error {
public:
    using Error::Error;
};

// Requested grid cannot fit in the configured memory budget.
class ResourceError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace fc
