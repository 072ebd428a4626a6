// error.hpp - exception hierarchy shared by every colpack module.
//
// Each category maps onto one CLI exit code, so drivers can translate a
// failure without inspecting message text.
#pragma once

#include <stdexcept>
#include <string>

namespace colpack {

enum class ErrorKind { kConfig, kData, kInvariant };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Bad parameters or configuration (exit code 2).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kConfig, what) {}
};

// Malformed or unreadable input data (exit code 3).
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

// A structural invariant was violated (exit code 4).
class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what)
      : Error(ErrorKind::kInvariant, what) {}
};

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return 2;
    case ErrorKind::kData:
      return 3;
    case ErrorKind::kInvariant:
      return 4;
  }
  return 1;
}

}  // namespace colpack
