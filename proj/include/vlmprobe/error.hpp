#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vlmprobe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Lexical resources
// ---------------------------------------------------------------------------

class MalformedResource : public Error {
 public:
  MalformedResource(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line), reason_(reason) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class DanglingReference : public Error {
 public:
  using Error::Error;
};

class CycleDetected : public Error {
 public:
  using Error::Error;
};

/// A resource file could not be opened; carries the path.
class ResourceNotFound : public Error {
 public:
  explicit ResourceNotFound(const std::string& path)
      : Error("cannot open resource file '" + path + "'"), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Any resource parse failure, rethrown with the file it came from.
class ResourceFileError : public Error {
 public:
  ResourceFileError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// ---------------------------------------------------------------------------
// Interchange file
// ---------------------------------------------------------------------------

class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& field, const std::string& reason)
      : Error("line " + std::to_string(line) + ": field '" + field + "': " + reason),
        line_(line),
        field_(field) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

class TripletMismatch : public Error {
 public:
  TripletMismatch(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DuplicateId : public Error {
 public:
  DuplicateId(const std::string& id, std::size_t first_line, std::size_t line)
      : Error("line " + std::to_string(line) + ": duplicate id '" + id + "' (first seen on line " +
              std::to_string(first_line) + ")"),
        first_line_(first_line),
        line_(line) {}

  std::size_t first_line() const noexcept { return first_line_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t first_line_;
  std::size_t line_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ZeroVector : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Numerics
// ---------------------------------------------------------------------------

class DegenerateColumn : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class BothGroupsConstant : public Error {
 public:
  using Error::Error;
};

class ZeroVariance : public Error {
 public:
  using Error::Error;
};

class NonPositiveDf : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace vlmprobe
