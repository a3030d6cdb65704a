#pragma once

#include <stdexcept>
#include <string>

namespace bass {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class IncompatibleEncoderError : public Error {
 public:
  using Error::Error;
};

class InfeasibleCountError : public Error {
 public:
  using Error::Error;
};

class DegenerateFeatureError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

// Raised by backends. `transient` errors are retried by the client.
class BackendError : public Error {
 public:
  BackendError(const std::string& what, bool transient = true, int code = 0)
      : Error(what), transient_(transient), code_(code) {}

  bool transient() const noexcept { return transient_; }
  int code() const noexcept { return code_; }

 private:
  bool transient_;
  int code_;
};

}  // namespace bass
