#pragma once

#include <stdexcept>
#include <string>

namespace score {

enum class ErrorKind {
  InvalidArgument,
  Parse,
  Validation,
  Io,
  UnknownNode,
  NoPath,
  NoLots,
  OutOfRange,
  State,
};

// Single exception type for the whole core. kind() maps 1:1 onto the
// status codes of the C API.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace score
