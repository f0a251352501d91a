#pragma once

#include <stdexcept>
#include <string>

namespace coercive {

// Base for every error raised by the library. Callers that only care about
// "did the numerical contract hold" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dimensions of the arguments disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// An argument is outside the operation's domain (non-positive scale,
// slope outside (0,1), asymmetric matrix, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A construction or search could not produce a valid result.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Malformed file, config or checkpoint.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace coercive
