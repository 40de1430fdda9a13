#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gzi {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied configuration (model file, CLI option, bounds).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; carries the 1-based line number of the offending line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A numerical routine was called outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace gzi
