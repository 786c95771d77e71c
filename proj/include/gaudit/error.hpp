#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gaudit {

// Every failure raised by the library derives from Error. kind() is a short
// stable tag used in machine-readable error records emitted by the CLI.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

// Caller-supplied arguments violate an operation's preconditions.
class InputError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "input"; }
};

// A file could not be parsed. line() is 1-based, 0 when not line-oriented.
class FormatError : public Error {
 public:
  FormatError(const std::string& source, std::size_t line, const std::string& msg)
      : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + msg),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }
  const char* kind() const noexcept override { return "format"; }

 private:
  std::size_t line_;
};

// Data is well-formed but mathematically degenerate for the requested
// operation (zero vectors, zero variance, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "degenerate"; }
};

// A remote scoring/training/tagging service failed or could not be reached.
class BackendError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "backend"; }
};

// The service answered with a 4xx-class status: the request itself is bad and
// retrying will not help.
class ProtocolError : public BackendError {
 public:
  ProtocolError(int status, const std::string& msg)
      : BackendError("protocol error (HTTP " + std::to_string(status) + "): " + msg), status_(status) {}
  int status() const noexcept { return status_; }
  const char* kind() const noexcept override { return "protocol"; }

 private:
  int status_;
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

}  // namespace gaudit
