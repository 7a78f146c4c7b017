#pragma once

#include <stdexcept>
#include <string>

namespace qdk {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid curve or domain data (non-immersed, self-intersecting, bad nesting).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Caller broke an operation's precondition (size mismatch, bad argument).
class UsageError : public Error {
public:
    using Error::Error;
};

/// Evaluation point too close to the boundary for the quadrature to be trusted.
class ProximityError : public Error {
public:
    using Error::Error;
};

/// Evaluation point lies outside the domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A linear solve, root refinement or count check failed.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A configured degree or size limit was exceeded.
class CapacityError : public Error {
public:
    using Error::Error;
};

/// Degenerate algebraic output (e.g. a resultant that vanishes identically).
class AlgebraError : public Error {
public:
    using Error::Error;
};

/// Two independent computations of the same quantity disagree.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace qdk
