#pragma once

#include <stdexcept>
#include <string>

namespace nvdpt {

// Error categories surfaced through the C API as status codes.
enum class ErrorKind {
  InvalidArgument,
  Io,
  Schema,
  Numerical,
  Ambiguous,
  Degenerate,
  Empty,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorKind::InvalidArgument, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

// Schema violation in a spin-system document. `path` points at the offending field,
// e.g. "nuclei[1].hyperfine_mhz".
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(ErrorKind::Schema, path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

// Level tracking could not decide an assignment between two grid points.
class AmbiguityError : public Error {
 public:
  explicit AmbiguityError(const std::string& what) : Error(ErrorKind::Ambiguous, what) {}
};

// Hellmann-Feynman slope requested for a level inside a degenerate block.
class DegeneracyError : public Error {
 public:
  explicit DegeneracyError(const std::string& what) : Error(ErrorKind::Degenerate, what) {}
};

class EmptyResult : public Error {
 public:
  explicit EmptyResult(const std::string& what) : Error(ErrorKind::Empty, what) {}
};

}  // namespace nvdpt
