#pragma once

#include <stdexcept>
#include <string>

namespace opcalc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Point or parameter outside the domain of a function or operator.
class DomainError : public Error {
 public:
  using Error::Error;
};

class NoLimit : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

class Overflow : public Error {
 public:
  using Error::Error;
};

class Singular : public Error {
 public:
  using Error::Error;
};

class NotDiagonalizable : public Error {
 public:
  using Error::Error;
};

class BranchViolation : public Error {
 public:
  using Error::Error;
};

class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

class UnknownExperiment : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace opcalc
