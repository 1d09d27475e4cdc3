#pragma once

#include <stdexcept>
#include <string>

namespace drim {

// Mirrors the status codes of the public C API so capi.cpp can translate
// exceptions without string matching.
enum class ErrorCode {
  invalid_argument = 1,
  io = 2,
  parse = 3,
  numeric = 4,
  unavailable = 5,
  diverged = 6,
  internal = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace drim
