#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bcert/polynomial.hpp"
#include "bcert/rational_map.hpp"

namespace bcert {

using Belief = Eigen::VectorXd;

// Finite POMDP. Transition matrices are column-stochastic:
// transition[a](i, j) = P(next = state_i | current = state_j, action a).
struct Pomdp {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::string> observations;
  std::vector<Eigen::MatrixXd> transition;  // per action, n x n
  std::vector<Eigen::MatrixXd> obs;         // per action, n x |Z|: obs[a](q, z)
  Belief initial_belief;

  std::size_t n_states() const { return states.size(); }
  std::size_t n_actions() const { return actions.size(); }
  std::size_t n_observations() const { return observations.size(); }

  // Throws std::invalid_argument if any structural invariant fails
  // (stochasticity to 1e-9, entries in [0,1], nonempty sets).
  void validate() const;
};

// Semialgebraic policy: first region (list order) whose guard(b) <= 0 wins;
// `default_action` applies when no guard holds. Guards are polynomials over
// the full belief coordinates b1..bn.
struct PolicyPartition {
  struct Region {
    Poly guard;
    int action;
  };
  std::vector<Region> regions;
  int default_action = 0;
};

struct Trajectory {
  std::vector<Belief> beliefs;    // b_0 .. b_T
  std::vector<int> actions;       // a_0 .. a_{T-1}
  std::vector<int> observations;  // z_1 .. z_T
};

// Bayesian filter (predict with T_a, correct with O(.,a,z), normalize).
// Throws ZeroLikelihood when P(z | a, b) <= 1e-12.
Belief belief_update(const Pomdp& p, const Belief& b, int a, int z);

int policy_action(const PolicyPartition& policy, const Belief& b);

// Action source for simulation: a policy, or a fixed action sequence
// (cycled if shorter than the horizon), or uniformly random actions.
struct UniformActions {};
using ActionSource = std::variant<PolicyPartition, std::vector<int>, UniformActions>;

Trajectory simulate(const Pomdp& p, const ActionSource& actions, int horizon,
                    std::uint64_t seed);

// Sampled under-approximation of the reachable belief space: all beliefs
// visited over `n_trajectories` independent simulations.
std::vector<Belief> reach_sample(const Pomdp& p, const Belief& b0, int horizon,
                                 int n_trajectories, std::uint64_t seed,
                                 const std::optional<PolicyPartition>& policy = {});

// The switched-system view: one rational belief map per (action, observation),
// over the reduced coordinates y1..y_{n-1} (b_n eliminated).
RationalMap belief_map(const Pomdp& p, int a, int z);

// CSV with header t,b1,...,bn,action,observation (action blank on the last
// row, observation blank at t=0).
std::string trajectory_csv(const Pomdp& p, const Trajectory& t);
std::string cloud_csv(const Pomdp& p, const std::vector<Belief>& beliefs);

}  // namespace bcert
