#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geoshadow {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument: bad sizes, mismatched shapes, out-of-range flags.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Query outside the sampled domain of a raster.
class BoundsError : public Error {
 public:
  using Error::Error;
};

/// Input outside the mathematical domain of an operation (sun below horizon, bad UTM zone).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unsupported file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Text parse failure; carries the 1-based line number (0 when not applicable).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// File system failure, message includes the path.
class IoError : public Error {
 public:
  using Error::Error;
};

/// RPC denominator vanished.
class SingularCameraError : public Error {
 public:
  using Error::Error;
};

/// Iterative RPC inversion failed.
class LocalizationError : public Error {
 public:
  LocalizationError(const std::string& what, double residual_px, int iterations)
      : Error(what), residual_px_(residual_px), iterations_(iterations) {}
  double residual_px() const noexcept { return residual_px_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_px_;
  int iterations_;
};

/// Processing failure that is not attributable to malformed input (e.g. an all-nodata DSM).
class ProcessingError : public Error {
 public:
  using Error::Error;
};

}  // namespace geoshadow
