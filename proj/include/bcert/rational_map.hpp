#pragma once

#include <vector>

#include "bcert/polynomial.hpp"

namespace bcert {

// Per-(action, observation) belief update as a rational map y' = M(y) / N(y)
// with degree-1 numerators and a shared degree-1 denominator, over the
// reduced coordinates (the last belief coordinate eliminated).
struct RationalMap {
  std::vector<Poly> numerators;  // one per output coordinate
  Poly denominator;

  // Checks degree bounds, N not identically zero, and N >= -1e-12 on the
  // simplex vertices and 1000 fixed-seed Dirichlet samples.
  // Throws std::invalid_argument on violation.
  void validate() const;

  // Evaluate at a reduced-coordinate point (denominator must be nonzero).
  std::vector<double> eval(const std::vector<double>& y) const;
};

// N(y)^deg(V) * V(M(y)/N(y)), a polynomial of degree <= deg(V).
Poly compose_cleared(const Poly& V, const RationalMap& f);

}  // namespace bcert
