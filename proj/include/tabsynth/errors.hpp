#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tabsynth {

// Base for every error the core library throws. The C API maps each subclass
// onto a distinct status code.
struct Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgument : public Error {
  using Error::Error;
};

// Malformed input text. line/column are 1-based; 0 means "not applicable".
struct ParseError : public Error {
  std::size_t line;
  std::size_t column;
  ParseError(const std::string& message, std::size_t line_ = 0, std::size_t column_ = 0);
};

struct IoError : public Error {
  using Error::Error;
};

struct TransportError : public Error {
  bool retryable;
  int attempts;
  TransportError(const std::string& message, bool retryable_, int attempts_)
      : Error(message), retryable(retryable_), attempts(attempts_) {}
};

}  // namespace tabsynth
