#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "bcert/pomdp.hpp"
#include "bcert/psatz.hpp"

namespace bcert {

// Summary of the post-hoc audit attached to every certificate.
struct ValidationEvidence {
  bool checked = false;
  double identity_residual = 0.0;  // worst rational cone-identity residual
  double worst_margin = 0.0;       // worst sampled inequality margin
  int n_samples = 0;
  std::uint64_t seed = 0;
};

enum class ReachMode { Single, PerAction, PerPartition };

// Sublevel-set over-approximation of the reachable belief space.
// All polynomials live over the reduced coordinates y = (b1..b_{n-1}).
struct ReachCertificate {
  ReachMode mode = ReachMode::Single;
  struct Fn {
    Poly V;
    double gamma = 1.0;
    int scope = -1;  // -1: all actions; else action index / region index
  };
  std::vector<Fn> functions;
  int degree = 1;
  double epsilon = 0.1;  // contraction rate of the certified decrease
  std::optional<PolicyPartition> policy;
  std::vector<ConcreteWitness> witnesses;
  ValidationEvidence validated;

  // max_i V_i(y) - gamma; <= 0 inside the certified set.
  double membership(const Belief& b) const;
};

struct SafetyProperty {
  std::vector<int> unsafe_states;
  double lambda = 0.5;
};

struct OptimalityProperty {
  Eigen::MatrixXd reward;  // reward(q, a)
  double gamma = 0.0;
  Poly gamma_tilde;  // tube schedule, polynomial in the single variable t
};

enum class BarrierMode { Monolithic, PerAction, PerPartition };

// Time-indexed barrier B(t, y): negative at (0, b0), positive on the unsafe
// set at horizon tau, non-increasing along every belief transition.
struct BarrierCertificate {
  BarrierMode mode = BarrierMode::Monolithic;
  std::vector<Poly> functions;  // over vars (b1..b_{n-1}, t); one per scope
  int tau = 1;
  int degree = 1;
  std::variant<SafetyProperty, OptimalityProperty> property;
  std::optional<PolicyPartition> policy;
  std::vector<ConcreteWitness> witnesses;
  ValidationEvidence validated;
};

struct CertifierOptions {
  double epsilon = 0.1;        // reach contraction rate
  double coeff_bound = 500.0;  // box on certificate coefficients
  double interior_weight = 3.0;  // tightening objective: weight of the
                                 // mean-over-simplex term vs the vertex sum
  double strict_margin = 1e-6;   // barrier strict inequalities
  int t_degree = 2;              // barrier degree cap in t
  SolveOptions lp;
};

// Lyapunov sublevel over-approximations. Empty optional = the relaxation at
// this degree is infeasible (inconclusive, not a disproof).
std::optional<ReachCertificate> reach_single(const Pomdp& p, const Belief& b0, int degree,
                                             const CertifierOptions& opt = {});
std::optional<ReachCertificate> reach_per_action(const Pomdp& p, const Belief& b0,
                                                 int degree,
                                                 const CertifierOptions& opt = {});
std::optional<ReachCertificate> reach_policy(const Pomdp& p, const Belief& b0,
                                             const PolicyPartition& policy, int degree,
                                             const CertifierOptions& opt = {});

// Barrier-certificate safety verification. Throws OverlapError when b0 is
// already unsafe. The per-partition mode requires a policy.
std::optional<BarrierCertificate> verify_safety(
    const Pomdp& p, const Belief& b0, const SafetyProperty& unsafe, int tau, int degree,
    BarrierMode mode = BarrierMode::Monolithic,
    const std::optional<PolicyPartition>& policy = {}, const CertifierOptions& opt = {});

// Cumulative-reward bound via a reward tube. gamma_tilde defaults to the
// constant gamma / (tau + 1); throws TubeViolation when the tube sums above
// gamma.
std::optional<BarrierCertificate> verify_optimality(
    const Pomdp& p, const Belief& b0, const Eigen::MatrixXd& reward, double gamma,
    std::optional<Poly> gamma_tilde, int tau, int degree,
    const CertifierOptions& opt = {});

// Post-hoc audit: rational re-verification of every cone identity plus
// sampled inequality checks (Dirichlet points and simulated trajectories),
// margin floor -1e-8. Throws ValidationFailure with the violating point.
ValidationEvidence validate_certificate(const ReachCertificate& cert, const Pomdp& p,
                                        int n_samples, std::uint64_t seed);
ValidationEvidence validate_certificate(const BarrierCertificate& cert, const Pomdp& p,
                                        int n_samples, std::uint64_t seed);

// Reduced-coordinate helpers shared with the CLI.
std::vector<double> reduce_belief(const Belief& b);
Poly reduce_poly(const Poly& full, std::size_t n_states);

// The LPs that reach_per_action / verify_safety would solve, for export-only
// mode (one program per scope).
std::vector<LinearProgram> reach_programs(const Pomdp& p, const Belief& b0, int degree,
                                          ReachMode mode,
                                          const std::optional<PolicyPartition>& policy,
                                          const CertifierOptions& opt = {});

}  // namespace bcert
