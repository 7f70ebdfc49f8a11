#pragma once

#include <stdexcept>
#include <string>

namespace fairq {

// Root of every error raised by the library. Each subclass names the
// failure category; callers that only care about "something went wrong"
// catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* category() const noexcept { return "error"; }
};

// Two grids that must share geometry do not.
class GeometryError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "geometry"; }
};

// Malformed input: bad parameters, non-normalized densities, unknown keys.
class ValidationError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "validation"; }
};

// A point or level lies outside the domain on which an object is defined.
class DomainError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "domain"; }
};

// A map produced a non-finite value where a finite one is required.
class NumericError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "numeric"; }
};

// The signed part of the group difference carries (numerically) no mass:
// the two group feature laws coincide and f* should be used everywhere.
class DegenerateDecomposition : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "degenerate"; }
};

// f* pushes a positive-mass piece of mu+ or mu- onto a single value.
class AssumptionViolation : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "assumption"; }
};

class UnsupportedForFigures : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "unsupported"; }
};

}  // namespace fairq
