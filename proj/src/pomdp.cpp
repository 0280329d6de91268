#include "bcert/pomdp.hpp"

#include <cmath>
#include <sstream>

#include "bcert/errors.hpp"
#include "bcert/rng.hpp"

namespace bcert {

void Pomdp::validate() const {
  const std::size_t n = n_states();
  if (n < 1) throw std::invalid_argument("POMDP needs at least one state");
  if (actions.empty()) throw std::invalid_argument("POMDP needs at least one action");
  if (observations.empty())
    throw std::invalid_argument("POMDP needs at least one observation");
  if (transition.size() != n_actions() || obs.size() != n_actions())
    throw std::invalid_argument("per-action kernel count mismatch");
  const double tol = 1e-9;
  for (std::size_t a = 0; a < n_actions(); ++a) {
    const auto& T = transition[a];
    if (T.rows() != static_cast<Eigen::Index>(n) || T.cols() != static_cast<Eigen::Index>(n))
      throw std::invalid_argument("transition matrix shape mismatch");
    for (Eigen::Index j = 0; j < T.cols(); ++j) {
      double col = 0;
      for (Eigen::Index i = 0; i < T.rows(); ++i) {
        if (T(i, j) < -0.0 || T(i, j) > 1.0 + tol)
          throw std::invalid_argument("transition entry outside [0,1]");
        col += T(i, j);
      }
      if (std::abs(col - 1.0) > tol)
        throw std::invalid_argument("transition column " + std::to_string(j) +
                                    " of action " + actions[a] + " does not sum to 1");
    }
    const auto& O = obs[a];
    if (O.rows() != static_cast<Eigen::Index>(n) ||
        O.cols() != static_cast<Eigen::Index>(n_observations()))
      throw std::invalid_argument("observation matrix shape mismatch");
    for (Eigen::Index q = 0; q < O.rows(); ++q) {
      double row = 0;
      for (Eigen::Index z = 0; z < O.cols(); ++z) {
        if (O(q, z) < -0.0 || O(q, z) > 1.0 + tol)
          throw std::invalid_argument("observation entry outside [0,1]");
        row += O(q, z);
      }
      if (std::abs(row - 1.0) > tol)
        throw std::invalid_argument("observation distribution does not sum to 1");
    }
  }
  if (initial_belief.size() != static_cast<Eigen::Index>(n))
    throw std::invalid_argument("initial belief dimension mismatch");
  double s = 0;
  for (Eigen::Index i = 0; i < initial_belief.size(); ++i) {
    if (initial_belief(i) < 0) throw std::invalid_argument("negative initial belief");
    s += initial_belief(i);
  }
  if (std::abs(s - 1.0) > tol)
    throw std::invalid_argument("initial belief does not sum to 1");
}

static Belief clamp_normalize(Belief b) {
  for (Eigen::Index i = 0; i < b.size(); ++i)
    if (b(i) < 0) b(i) = b(i) > -1e-12 ? 0.0 : throw std::invalid_argument(
                             "belief entry below -1e-12 after update");
  b /= b.sum();
  return b;
}

Belief belief_update(const Pomdp& p, const Belief& b, int a, int z) {
  Belief predicted = p.transition[a] * b;
  Belief post = predicted.cwiseProduct(p.obs[a].col(z));
  double denom = post.sum();
  if (denom <= 1e-12)
    throw ZeroLikelihood("observation " + p.observations[z] + " has zero likelihood under action " +
                         p.actions[a]);
  return clamp_normalize(post / denom);
}

int policy_action(const PolicyPartition& policy, const Belief& b) {
  std::vector<double> pt(b.data(), b.data() + b.size());
  for (const auto& r : policy.regions) {
    if (r.guard.eval(pt) <= 0.0) return r.action;
  }
  return policy.default_action;
}

Trajectory simulate(const Pomdp& p, const ActionSource& actions, int horizon,
                    std::uint64_t seed) {
  Rng rng(seed);
  Trajectory t;
  Belief b = p.initial_belief;
  t.beliefs.push_back(b);

  // Hidden state sampled from the initial belief.
  std::vector<double> w(b.data(), b.data() + b.size());
  int q = rng.categorical(w);

  for (int step = 0; step < horizon; ++step) {
    int a;
    if (const auto* pol = std::get_if<PolicyPartition>(&actions)) {
      a = policy_action(*pol, b);
    } else if (const auto* seq = std::get_if<std::vector<int>>(&actions)) {
      a = seq->empty() ? 0 : (*seq)[step % seq->size()];
    } else {
      a = static_cast<int>(rng.next_u64() % p.n_actions());
    }
    // Hidden-state transition, column j = current state.
    std::vector<double> tw(p.n_states());
    for (std::size_t i = 0; i < p.n_states(); ++i) tw[i] = p.transition[a](i, q);
    q = rng.categorical(tw);
    // Observation from the new hidden state.
    std::vector<double> ow(p.n_observations());
    for (std::size_t z = 0; z < p.n_observations(); ++z) ow[z] = p.obs[a](q, z);
    int z = rng.categorical(ow);

    b = belief_update(p, b, a, z);
    t.actions.push_back(a);
    t.observations.push_back(z);
    t.beliefs.push_back(b);
  }
  return t;
}

std::vector<Belief> reach_sample(const Pomdp& p, const Belief& b0, int horizon,
                                 int n_trajectories, std::uint64_t seed,
                                 const std::optional<PolicyPartition>& policy) {
  Pomdp model = p;
  model.initial_belief = b0;
  std::vector<Belief> cloud;
  cloud.reserve(static_cast<std::size_t>(n_trajectories) * (horizon + 1));
  for (int k = 0; k < n_trajectories; ++k) {
    std::uint64_t s = splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (k + 1)));
    ActionSource src = policy ? ActionSource(*policy) : ActionSource(UniformActions{});
    Trajectory t = simulate(model, src, horizon, s);
    for (auto& b : t.beliefs) cloud.push_back(std::move(b));
  }
  return cloud;
}

RationalMap belief_map(const Pomdp& p, int a, int z) {
  const std::size_t n = p.n_states();
  const std::size_t m = n - 1;
  auto yvars = belief_vars(m);  // reduced coordinates share the b1.. names

  // b_i = y_i for i < n, b_n = 1 - sum y_i.
  std::vector<Poly> b(n, Poly(yvars));
  for (std::size_t i = 0; i < m; ++i) b[i] = Poly::variable(yvars, yvars[i]);
  Poly last = Poly::constant(yvars, 1.0);
  for (std::size_t i = 0; i < m; ++i) last = last - b[i];
  if (n >= 1) b[n - 1] = last;

  RationalMap f;
  f.denominator = Poly::constant(yvars, 0.0);
  std::vector<Poly> post(n, Poly(yvars));
  for (std::size_t i = 0; i < n; ++i) {
    Poly predicted = Poly::constant(yvars, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      predicted = predicted + b[j] * p.transition[a](i, j);
    post[i] = predicted * p.obs[a](i, z);
    f.denominator = f.denominator + post[i];
  }
  f.numerators.assign(post.begin(), post.end() - 1);
  f.validate();
  return f;
}

static void append_row(std::ostringstream& os, const Pomdp& p, int t, const Belief& b,
                       const std::string& action, const std::string& obsname) {
  os << t;
  char buf[64];
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", b(i));
    os << "," << buf;
  }
  os << "," << action << "," << obsname << "\n";
}

static std::string csv_header(const Pomdp& p) {
  std::ostringstream os;
  os << "t";
  for (std::size_t i = 1; i <= p.n_states(); ++i) os << ",b" << i;
  os << ",action,observation\n";
  return os.str();
}

std::string trajectory_csv(const Pomdp& p, const Trajectory& t) {
  std::ostringstream os;
  os << csv_header(p);
  for (std::size_t k = 0; k < t.beliefs.size(); ++k) {
    std::string action = k < t.actions.size() ? p.actions[t.actions[k]] : "";
    std::string obsname = k > 0 ? p.observations[t.observations[k - 1]] : "";
    append_row(os, p, static_cast<int>(k), t.beliefs[k], action, obsname);
  }
  return os.str();
}

std::string cloud_csv(const Pomdp& p, const std::vector<Belief>& beliefs) {
  std::ostringstream os;
  os << csv_header(p);
  for (std::size_t k = 0; k < beliefs.size(); ++k)
    append_row(os, p, static_cast<int>(k), beliefs[k], "", "");
  return os.str();
}

}  // namespace bcert
