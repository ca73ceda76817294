#ifndef OUM_ERRORS_HPP
#define OUM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace oum {

// Base type for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input text (mesh files, tables). Carries a 1-based line number.
struct ParseError : Error {
  ParseError(const std::string& msg, long line)
      : Error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
  long line;
};

// Violated mesh invariants: degenerate triangles, dangling indices,
// non-manifold connectivity.
struct MeshError : Error {
  using Error::Error;
};

// Invalid run configuration or operation preconditions.
struct ConfigError : Error {
  using Error::Error;
};

// A weight evaluator returned a nonpositive value.
struct InvalidWeightError : Error {
  using Error::Error;
};

// Solver-internal consistency failures (no boundary set, non-finite values).
struct SolveError : Error {
  using Error::Error;
};

// Query point not contained in any mesh triangle.
struct OutsideMeshError : Error {
  using Error::Error;
};

}  // namespace oum

#endif
