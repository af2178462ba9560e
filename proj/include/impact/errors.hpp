#pragma once

#include <stdexcept>
#include <string>

namespace impact {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDiscretization : public Error {
 public:
  using Error::Error;
};

class EmptyActionSpace : public Error {
 public:
  using Error::Error;
};

class InvalidMetaArm : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class InfeasibleInstance : public Error {
 public:
  using Error::Error;
};

class InternalInconsistency : public Error {
 public:
  using Error::Error;
};

class InvalidHorizon : public Error {
 public:
  using Error::Error;
};

// Bad or inconsistent experiment configuration. The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class SlopeUndefined : public Error {
 public:
  using Error::Error;
};

}  // namespace impact
