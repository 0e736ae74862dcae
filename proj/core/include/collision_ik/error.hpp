#pragma once

#include <stdexcept>
#include <string>

namespace cik {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A document could not be parsed (malformed JSON, wrong field types).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A document parsed but violates a model invariant. The message starts with
/// the offending field path, e.g. "joints[2].axis: not unit length".
class ValidationError : public Error {
 public:
  ValidationError(const std::string& field_path, const std::string& detail)
      : Error(field_path + ": " + detail), field_path_(field_path) {}

  const std::string& field_path() const noexcept { return field_path_; }

 private:
  std::string field_path_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Point cloud with fewer than four points or without full 3-D rank.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Objective or probe evaluated to NaN/inf where a finite value is required.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

}  // namespace cik

namespace cik {

class UnknownIdError : public Error {
 public:
  using Error::Error;
};

class DuplicateIdError : public Error {
 public:
  using Error::Error;
};

}  // namespace cik
