#pragma once

#include <stdexcept>
#include <string>

namespace qrinv {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

class InvalidCoefficient : public Error {
 public:
  using Error::Error;
};

class UnknownTag : public Error {
 public:
  explicit UnknownTag(const std::string& tag) : Error("unknown curve tag '" + tag + "'") {}
};

class MeshMismatch : public Error {
 public:
  using Error::Error;
};

class FactorizationFailure : public Error {
 public:
  using Error::Error;
};

class DegenerateSupport : public Error {
 public:
  using Error::Error;
};

class NoPeak : public Error {
 public:
  using Error::Error;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Configuration and file-format problems (CLI exit code 2).
class ValidationError : public Error {
 public:
  using Error::Error;
};

}  // namespace qrinv
