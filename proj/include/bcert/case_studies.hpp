#pragma once

#include <utility>

#include "bcert/pomdp.hpp"

namespace bcert {

// Interactive ad-scheduling model: three interest levels, two actions
// (no ads / show ads), like-count observations bucketed by two thresholds
// with Poisson-distributed counts per interest level.
struct AdSchedulingSpec {
  double poisson_rates[3] = {2.0, 4.0, 6.0};
  int gamma1 = 3;  // likes <= gamma1          -> z1 (low)
  int gamma2 = 6;  // gamma1 < likes <= gamma2 -> z2 (medium), else z3 (high)
  Eigen::MatrixXd t_no_ads;    // column-stochastic, next-state rows
  Eigen::MatrixXd t_show_ads;
  bool uniform_initial = true;  // (1/3, 1/3, 1/3); otherwise all mass on q1

  AdSchedulingSpec();
};

Pomdp build_ad_pomdp(const AdSchedulingSpec& spec = {});

// The threshold policy studied with this model: no ads while
// b(q1) + b(q2) <= 0.5, ads otherwise.
PolicyPartition ad_threshold_policy();

// Machine-teaching learner on a lattice of hypotheses. Actions are examples
// (one per cell); showing example x rules the hypothesis at x out. A learner
// whose hypothesis survives stays put; a contradicted learner jumps uniformly
// to the l1-nearest surviving hypotheses. Labels are deterministic:
// +1 iff the example is consistent with the (new) hypothesis.
struct LatticeTeachingSpec {
  int width = 4;
  int height = 4;
  std::pair<int, int> h0 = {1, 1};      // 1-based (row, column)
  std::pair<int, int> target = {3, 3};  // used for property queries, not dynamics
};

Pomdp build_lattice_pomdp(const LatticeTeachingSpec& spec = {});

// State index of a 1-based (row, column) cell in the lattice model.
int lattice_state(const LatticeTeachingSpec& spec, std::pair<int, int> cell);

}  // namespace bcert
