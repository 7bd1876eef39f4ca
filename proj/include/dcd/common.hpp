#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dcd {

/// Parameterization is representable but has no normalizable density to sample from.
struct ImproperDistribution : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Density evaluation requested outside the support of the distribution.
struct OutOfSupport : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A Gibbs conditional came out improper (shard too small or empty component).
struct ImproperConditional : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every mixture component has zero likelihood for an observation.
struct DegenerateLikelihood : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Closed-form density requested where the shape parameter makes it undefined.
struct ShapeAtBoundary : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two density grids that must match do not.
struct GridMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shard count outside 1..n.
struct InvalidShardCount : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parameter summaries requested from draws that do not carry them.
struct MissingParams : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One or more shard chains failed; message lists shard indices and causes.
struct ShardFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input file has no data rows.
struct EmptyFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file; carries 1-based line (0 = whole file) and column.
struct ParseError : std::runtime_error {
  std::size_t line;
  std::size_t column;
  ParseError(const std::string& msg, std::size_t line_, std::size_t column_ = 0)
      : std::runtime_error(msg), line(line_), column(column_) {}
};

}  // namespace dcd
