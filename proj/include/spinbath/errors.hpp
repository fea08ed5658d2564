#pragma once

#include <stdexcept>

namespace spinbath {

// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Two containers that must describe the same bath disagree on N.
class LengthMismatch : public Error {
public:
  using Error::Error;
};

// A NaN or infinity where a finite number is required.
class NonFiniteValue : public Error {
public:
  using Error::Error;
};

// Binary exponent left the signed 64-bit range.
class ExponentOverflow : public Error {
public:
  using Error::Error;
};

// A ScaledComplex value does not fit into a native double.
class RangeOverflow : public Error {
public:
  using Error::Error;
};

// Brute-force enumeration requested beyond its size cap.
class BathTooLarge : public Error {
public:
  using Error::Error;
};

// The off-diagonal content at t=0 is too small to normalize against.
class NormalizationDegenerate : public Error {
public:
  using Error::Error;
};

// A domain type failed its construction invariants.
class InvalidModel : public Error {
public:
  using Error::Error;
};

// A time grid violated its invariants or misses a required point.
class GridError : public Error {
public:
  using Error::Error;
};

// Bad command line or configuration file input (exit status 2).
class UsageError : public Error {
public:
  using Error::Error;
};

// File could not be read or written (exit status 1).
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace spinbath
