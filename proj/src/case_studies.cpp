#include "bcert/case_studies.hpp"

#include <cmath>
#include <stdexcept>

namespace bcert {

AdSchedulingSpec::AdSchedulingSpec() {
  t_no_ads.resize(3, 3);
  t_no_ads << 0.8, 0.2, 0.1,  //
      0.1, 0.7, 0.2,          //
      0.1, 0.1, 0.7;
  t_show_ads.resize(3, 3);
  t_show_ads << 0.5, 0.3, 0.2,  //
      0.3, 0.6, 0.2,            //
      0.2, 0.1, 0.6;
}

namespace {

// P(X <= k) partial sums for X ~ Poisson(rate), computed by running the pmf
// term recurrence (exact to double rounding, no factorial overflow).
double poisson_cdf(double rate, int k) {
  if (k < 0) return 0.0;
  double term = std::exp(-rate);
  double sum = term;
  for (int j = 1; j <= k; ++j) {
    term *= rate / j;
    sum += term;
  }
  return sum;
}

}  // namespace

Pomdp build_ad_pomdp(const AdSchedulingSpec& spec) {
  for (double r : spec.poisson_rates)
    if (r <= 0.0) throw std::invalid_argument("Poisson rates must be positive");
  if (spec.gamma1 >= spec.gamma2)
    throw std::invalid_argument("like-count thresholds must satisfy gamma1 < gamma2");

  Pomdp p;
  p.states = {"q1", "q2", "q3"};
  p.actions = {"a0", "a1"};  // no ads / show ads
  p.observations = {"z1", "z2", "z3"};
  p.transition = {spec.t_no_ads, spec.t_show_ads};

  Eigen::MatrixXd O(3, 3);
  for (int q = 0; q < 3; ++q) {
    double rate = spec.poisson_rates[q];
    double low = poisson_cdf(rate, spec.gamma1);
    double mid = poisson_cdf(rate, spec.gamma2) - low;
    O(q, 0) = low;
    O(q, 1) = mid;
    O(q, 2) = std::max(0.0, 1.0 - low - mid);
  }
  p.obs = {O, O};

  if (spec.uniform_initial)
    p.initial_belief = Belief::Constant(3, 1.0 / 3.0);
  else
    p.initial_belief = Belief{{1.0, 0.0, 0.0}};
  p.validate();
  return p;
}

PolicyPartition ad_threshold_policy() {
  PolicyPartition pol;
  auto vars = belief_vars(3);
  Poly guard = Poly::variable(vars, "b1") + Poly::variable(vars, "b2") -
               Poly::constant(vars, 0.5);
  pol.regions.push_back({guard, 0});  // b(q1)+b(q2) <= 0.5 -> no ads
  pol.default_action = 1;
  return pol;
}

int lattice_state(const LatticeTeachingSpec& spec, std::pair<int, int> cell) {
  auto [r, c] = cell;
  if (r < 1 || r > spec.height || c < 1 || c > spec.width)
    throw std::invalid_argument("lattice cell out of range");
  return (r - 1) * spec.width + (c - 1);
}

Pomdp build_lattice_pomdp(const LatticeTeachingSpec& spec) {
  if (spec.width < 1 || spec.height < 1)
    throw std::invalid_argument("lattice dimensions must be positive");
  if (spec.h0 == spec.target)
    throw std::invalid_argument("initial and target hypotheses must differ");
  const int n = spec.width * spec.height;
  if (n < 2) throw std::invalid_argument("lattice needs at least two cells");
  (void)lattice_state(spec, spec.h0);
  (void)lattice_state(spec, spec.target);

  Pomdp p;
  auto cell_name = [&](int s) {
    return std::to_string(s / spec.width + 1) + "_" + std::to_string(s % spec.width + 1);
  };
  for (int s = 0; s < n; ++s) p.states.push_back("h" + cell_name(s));
  for (int s = 0; s < n; ++s) p.actions.push_back("x" + cell_name(s));
  p.observations = {"-1", "+1"};

  auto l1 = [&](int s, int t) {
    return std::abs(s / spec.width - t / spec.width) +
           std::abs(s % spec.width - t % spec.width);
  };

  for (int x = 0; x < n; ++x) {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
    for (int h = 0; h < n; ++h) {
      if (h != x) {
        T(h, h) = 1.0;  // hypothesis survives the example: no move
        continue;
      }
      // Contradicted: jump uniformly to the l1-nearest surviving hypotheses.
      int best = -1;
      for (int s = 0; s < n; ++s)
        if (s != x && (best < 0 || l1(h, s) < best)) best = l1(h, s);
      int ties = 0;
      for (int s = 0; s < n; ++s)
        if (s != x && l1(h, s) == best) ++ties;
      for (int s = 0; s < n; ++s)
        if (s != x && l1(h, s) == best) T(s, h) = 1.0 / ties;
    }
    p.transition.push_back(std::move(T));

    // Deterministic label: +1 iff the example is consistent with the
    // hypothesis the observation is emitted from.
    Eigen::MatrixXd O = Eigen::MatrixXd::Zero(n, 2);
    for (int h = 0; h < n; ++h) {
      if (h == x) O(h, 0) = 1.0;
      else O(h, 1) = 1.0;
    }
    p.obs.push_back(std::move(O));
  }

  p.initial_belief = Belief::Zero(n);
  p.initial_belief(lattice_state(spec, spec.h0)) = 1.0;
  p.validate();
  return p;
}

}  // namespace bcert
