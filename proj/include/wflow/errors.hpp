#pragma once

#include <stdexcept>
#include <string>

namespace wflow {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// A closed-form expression left the representable floating range.
class DomainOverflow : public Error {
public:
    using Error::Error;
};

/// A derivative was requested beyond the jet capacity.
class UnsupportedOrder : public Error {
public:
    using Error::Error;
};

/// |alpha| >= 1: the excited-state node and the ground-state decay are undefined.
class InvalidAsymmetry : public Error {
public:
    using Error::Error;
};

/// The phase-space or quadrature lattice cannot hold the state to the required accuracy.
class GridInsufficient : public Error {
public:
    using Error::Error;
};

class LoopThroughZero : public Error {
public:
    using Error::Error;
};

class NonIntegerWinding : public Error {
public:
    using Error::Error;
};

}  // namespace wflow
