#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace neutroseg {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Matrix/boundary/image shapes do not agree or are too small.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A raster file could not be read or decoded.
class DecodeError : public Error {
 public:
  using Error::Error;
};

/// A raster decoded fine but is not single-channel grayscale.
class ChannelError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input (label CSV, config file, result JSON).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  /// 1-based line of the offending record, 0 when not line oriented.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// An algorithm parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input values fall outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Two nodes handed to the edge-weight function are not 8-neighbors.
class TopologyError : public Error {
 public:
  using Error::Error;
};

/// The search region below the RPE is too small to segment.
class GeometryError : public Error {
 public:
  GeometryError(const std::string& what, std::vector<std::size_t> columns)
      : Error(what), columns_(std::move(columns)) {}

  /// Columns whose RPE row leaves no room for the choroid search.
  const std::vector<std::size_t>& columns() const noexcept { return columns_; }

 private:
  std::vector<std::size_t> columns_;
};

/// Manual correction with both picked points in the same column.
class DegenerateSelectionError : public Error {
 public:
  using Error::Error;
};

/// Entropy of an empty matrix.
class UndefinedInputError : public Error {
 public:
  using Error::Error;
};

/// Error metric over an empty label set.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace neutroseg
