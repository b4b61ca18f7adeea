#pragma once

#include <stdexcept>
#include <string>

namespace comot {

enum class ErrorCode {
  InvalidBox,
  ConfigParse,
  UnknownKey,
  NonFiniteCost,
  SingularInnovation,
  EmptyGraph,
  NoGroundTruth,
  ParseError,
  FrameOrderError,
  MissingPose,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Base exception for every recoverable failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidBox : public Error {
 public:
  explicit InvalidBox(const std::string& what) : Error(ErrorCode::InvalidBox, what) {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NonFiniteCost : public Error {
 public:
  explicit NonFiniteCost(const std::string& what) : Error(ErrorCode::NonFiniteCost, what) {}
};

class SingularInnovation : public Error {
 public:
  explicit SingularInnovation(const std::string& what)
      : Error(ErrorCode::SingularInnovation, what) {}
};

class EmptyGraph : public Error {
 public:
  explicit EmptyGraph(const std::string& what) : Error(ErrorCode::EmptyGraph, what) {}
};

class NoGroundTruth : public Error {
 public:
  explicit NoGroundTruth(const std::string& what) : Error(ErrorCode::NoGroundTruth, what) {}
};

/// Raised by the file readers; `line()` is 1-based, 0 when not tied to a line.
class DataError : public Error {
 public:
  DataError(ErrorCode code, const std::string& what, std::size_t line = 0)
      : Error(code, what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace comot
