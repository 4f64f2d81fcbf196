#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace proofloop {

// Base of every exception thrown by the library. `kind()` is a stable,
// machine-readable tag used by the CLI on stderr.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class IllegalLiteral : public Error {
 public:
  explicit IllegalLiteral(const std::string& literal)
      : Error("IllegalLiteral", "illegal literal '" + literal + "'"),
        literal_(literal) {}
  const std::string& literal() const noexcept { return literal_; }

 private:
  std::string literal_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& reason)
      : Error("ParseError",
              "parse error at byte " + std::to_string(offset) + ": " + reason),
        offset_(offset),
        reason_(reason) {}
  std::size_t offset() const noexcept { return offset_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t offset_;
  std::string reason_;
};

// Raised for a structurally invalid Problem (duplicate rules, bad arity, ...).
class InvalidProblem : public Error {
 public:
  explicit InvalidProblem(const std::string& what)
      : Error("InvalidProblem", what) {}
};

class ExhaustedSampling : public Error {
 public:
  explicit ExhaustedSampling(const std::string& what)
      : Error("ExhaustedSampling", what) {}
};

class InvalidPrefix : public Error {
 public:
  explicit InvalidPrefix(const std::string& what)
      : Error("InvalidPrefix", what) {}
};

class TraceMismatch : public Error {
 public:
  explicit TraceMismatch(const std::string& what)
      : Error("TraceMismatch", what) {}
};

class UnsupportedFormat : public Error {
 public:
  explicit UnsupportedFormat(const std::string& format)
      : Error("UnsupportedFormat", "unsupported report format '" + format + "'") {}
};

// A record line that is not valid JSON or lacks a required field.
class BadRecord : public Error {
 public:
  explicit BadRecord(const std::string& what) : Error("BadRecord", what) {}
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what) : Error("EmptyInput", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("ConfigError", what) {}
};

}  // namespace proofloop
