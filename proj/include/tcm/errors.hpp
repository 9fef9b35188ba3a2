#pragma once

#include <stdexcept>
#include <string>

namespace tcm {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Mathematically invalid argument: negative fractional order, integral
// endpoint at or below the lower limit, dyadic index outside the bank.
class DomainError : public Error {
public:
  using Error::Error;
};

// A structural invariant failed: g dropped below 1, a filter profile is
// not monotone, a state stopped being divergence free.
class InvariantError : public Error {
public:
  using Error::Error;
};

// Mismatched grids or array sizes between operands.
class ShapeError : public Error {
public:
  using Error::Error;
};

// Parameter combination that is deliberately unsupported.
class FeatureError : public Error {
public:
  using Error::Error;
};

// Invalid run configuration; message lists every violation found.
class ConfigError : public Error {
public:
  using Error::Error;
};

// Snapshot or output file problems.
class IoError : public Error {
public:
  using Error::Error;
};

// Input violates a documented operator precondition.
class PreconditionError : public Error {
public:
  using Error::Error;
};

}  // namespace tcm
