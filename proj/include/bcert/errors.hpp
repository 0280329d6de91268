#pragma once

#include <stdexcept>
#include <string>

namespace bcert {

// Observation has (numerically) zero likelihood under the current belief;
// the Bayesian filter denominator is below tolerance.
struct ZeroLikelihood : std::runtime_error {
  explicit ZeroLikelihood(const std::string& what) : std::runtime_error(what) {}
};

// No assignment of multiplier degrees can make a positivity identity
// degree-consistent.
struct DegreeMismatch : std::runtime_error {
  explicit DegreeMismatch(const std::string& what) : std::runtime_error(what) {}
};

// A certificate failed its post-hoc audit (identity residual, diagonal
// dominance, or sampled margin). Signals a compiler/solver bug.
struct ValidationFailure : std::runtime_error {
  explicit ValidationFailure(const std::string& what) : std::runtime_error(what) {}
};

// The reward tube does not sum below the requested bound.
struct TubeViolation : std::runtime_error {
  explicit TubeViolation(const std::string& what) : std::runtime_error(what) {}
};

// Initial belief set intersects the unsafe set: the query is ill-posed,
// distinct from an inconclusive search.
struct OverlapError : std::runtime_error {
  explicit OverlapError(const std::string& what) : std::runtime_error(what) {}
};

// Simplex pivot budget exhausted before reaching a verdict.
struct IterationLimit : std::runtime_error {
  explicit IterationLimit(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bcert
