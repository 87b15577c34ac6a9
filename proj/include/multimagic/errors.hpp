#pragma once

#include <stdexcept>
#include <string>

namespace multimagic {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RingMismatch : public Error {
 public:
  RingMismatch() : Error("operands belong to different rings") {}
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ArityMismatch : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// No bijection of the requested type exists (even ring with a fixed point of a -> -a+c).
class NoBijectionOfType : public Error {
 public:
  using Error::Error;
};

/// Some small integer required to be a unit is not one.
class SmallUnitGroup : public Error {
 public:
  using Error::Error;
};

class SearchBudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Dense materialization would exceed the cell budget.
class TooLarge : public Error {
 public:
  using Error::Error;
};

/// A power sum is not divisible by m^(d-1), so no normal magic hypercube has that side.
class NotIntegral : public Error {
 public:
  using Error::Error;
};

}  // namespace multimagic
