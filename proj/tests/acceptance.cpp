// Acceptance gate: one self-contained check per shipped guarantee, each
// printing a single PASS/FAIL line. Every criterion runs twice with fixed
// seeds; the final criterion compares the two transcripts byte-for-byte.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bcert/case_studies.hpp"
#include "bcert/certifier.hpp"
#include "bcert/errors.hpp"
#include "bcert/lp.hpp"
#include "bcert/pomdp.hpp"
#include "bcert/psatz.hpp"
#include "bcert/rng.hpp"

using namespace bcert;
using Clock = std::chrono::steady_clock;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------
// 1. The Bayesian filter matches an independent predict-correct-normalize
//    oracle on 1000 random instances to 1e-12.
Outcome criterion1(std::ostream& tr) {
  Rng rng(101);
  double worst = 0.0;
  int done = 0, skipped = 0;
  while (done < 1000) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 4);
    const int na = 1 + static_cast<int>(rng.next_u64() % 3);
    const int nz = 2 + static_cast<int>(rng.next_u64() % 3);
    Pomdp p;
    for (int q = 0; q < n; ++q) p.states.push_back("s" + std::to_string(q));
    for (int a = 0; a < na; ++a) p.actions.push_back("a" + std::to_string(a));
    for (int z = 0; z < nz; ++z) p.observations.push_back("z" + std::to_string(z));
    for (int a = 0; a < na; ++a) {
      Eigen::MatrixXd T(n, n), O(n, nz);
      for (int j = 0; j < n; ++j) {
        auto col = rng.dirichlet(n);
        for (int i = 0; i < n; ++i) T(i, j) = col[i];
      }
      for (int q = 0; q < n; ++q) {
        auto row = rng.dirichlet(nz);
        for (int z = 0; z < nz; ++z) O(q, z) = row[z];
      }
      p.transition.push_back(T);
      p.obs.push_back(O);
    }
    p.initial_belief = Belief::Constant(n, 1.0 / n);
    p.validate();

    auto bd = rng.dirichlet(n);
    Belief b = Eigen::Map<Eigen::VectorXd>(bd.data(), n);
    int a = static_cast<int>(rng.next_u64() % na);
    int z = static_cast<int>(rng.next_u64() % nz);

    // Independent oracle.
    Belief predicted = p.transition[a] * b;
    Belief joint(n);
    for (int q = 0; q < n; ++q) joint(q) = p.obs[a](q, z) * predicted(q);
    double denom = joint.sum();
    if (denom <= 1e-12) {
      bool threw = false;
      try {
        belief_update(p, b, a, z);
      } catch (const ZeroLikelihood&) {
        threw = true;
      }
      if (!threw) return {false, "zero-likelihood observation not rejected"};
      ++skipped;
      continue;
    }
    Belief expect = joint / denom;
    Belief got = belief_update(p, b, a, z);
    double err = (got - expect).cwiseAbs().maxCoeff();
    if (err > worst) worst = err;
    ++done;
  }
  tr << "c1 worst=" << fmt(worst) << " skipped=" << skipped << "\n";
  return {worst <= 1e-12,
          "worst filter deviation " + fmt(worst) + " over 1000 instances"};
}

// ---------------------------------------------------------------------------
// 2. The ad-scheduling observation table reproduces the nine published
//    values. The third column of the published table is the complement of
//    the *rounded* first two, so it carries up to two quanta of print
//    rounding; it is checked at that resolution plus the exact row-sum
//    identity.
Outcome criterion2(std::ostream& tr) {
  Pomdp p = build_ad_pomdp();
  const double expected[3][3] = {{0.8571, 0.1383, 0.0046},
                                 {0.4335, 0.4559, 0.1106},
                                 {0.1512, 0.4551, 0.3937}};
  double worst12 = 0.0, worst3 = 0.0, worst_sum = 0.0;
  for (int q = 0; q < 3; ++q) {
    worst12 = std::max(worst12, std::abs(p.obs[0](q, 0) - expected[q][0]));
    worst12 = std::max(worst12, std::abs(p.obs[0](q, 1) - expected[q][1]));
    worst3 = std::max(worst3, std::abs(p.obs[0](q, 2) - expected[q][2]));
    worst_sum = std::max(worst_sum, std::abs(p.obs[0].row(q).sum() - 1.0));
  }
  tr << "c2 worst12=" << fmt(worst12) << " worst3=" << fmt(worst3)
     << " sum=" << fmt(worst_sum) << "\n";
  bool ok = worst12 <= 5e-5 && worst3 <= 1.1e-4 && worst_sum <= 1e-12 &&
            p.obs[0] == p.obs[1];
  return {ok, "bucket columns within 5e-5, complement column within 1.1e-4, "
              "row sums exact (worst " + fmt(worst12) + " / " + fmt(worst3) + ")"};
}

// ---------------------------------------------------------------------------
// 3. Reachable-set over-approximation on the ad model: degree 1 contains the
//    high-interest corner, degree 3 excludes it, and both contain every
//    sampled reachable belief.
Outcome criterion3(std::ostream& tr) {
  Pomdp p = build_ad_pomdp();
  auto policy = ad_threshold_policy();
  auto d1 = reach_per_action(p, p.initial_belief, 1);
  if (!d1) return {false, "degree-1 reach search inconclusive"};
  auto d3 = reach_per_action(p, p.initial_belief, 3);
  if (!d3) return {false, "degree-3 reach search inconclusive"};

  Belief corner(3);
  corner << 0.0, 0.0, 1.0;
  double m1 = d1->membership(corner);
  double m3 = d3->membership(corner);

  auto cloud = reach_sample(p, p.initial_belief, 100, 100, 303, policy);
  double worst1 = -1e300, worst3 = -1e300;
  for (const auto& b : cloud) {
    worst1 = std::max(worst1, d1->membership(b));
    worst3 = std::max(worst3, d3->membership(b));
  }
  tr << "c3 corner1=" << fmt(m1) << " corner3=" << fmt(m3)
     << " cloud=" << cloud.size() << " worst1=" << fmt(worst1)
     << " worst3=" << fmt(worst3) << "\n";
  bool ok = m1 <= 0.0 && m3 > 1e-4 && cloud.size() >= 10000 &&
            worst1 <= 1e-8 && worst3 <= 1e-8;
  return {ok, "corner membership " + fmt(m1) + " (deg 1) / " + fmt(m3) +
              " (deg 3); worst cloud membership " + fmt(std::max(worst1, worst3)) +
              " over " + std::to_string(cloud.size()) + " beliefs"};
}

// ---------------------------------------------------------------------------
// 4. Safety certificates on 20 random absorbing-safe POMDPs all pass the
//    rational audit and are never contradicted by Monte-Carlo simulation.
Outcome criterion4(std::ostream& tr) {
  Rng rng(404);
  int certified = 0;
  double worst_mass = -1e300;
  for (int k = 0; k < 20; ++k) {
    const int n = 2 + k % 3;
    const int na = 1 + static_cast<int>(rng.next_u64() % 2);
    const int u = n - 1;  // unsafe state
    Pomdp p;
    for (int q = 0; q < n; ++q) p.states.push_back("s" + std::to_string(q));
    for (int a = 0; a < na; ++a) p.actions.push_back("a" + std::to_string(a));
    p.observations = {"z"};
    for (int a = 0; a < na; ++a) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
      for (int j = 0; j < n - 1; ++j) {
        // Safe states never transition into the unsafe state.
        auto col = rng.dirichlet(n - 1);
        for (int i = 0; i < n - 1; ++i) T(i, j) = col[i];
      }
      // Unsafe-state mass can only shrink or stay.
      auto col = rng.dirichlet(n);
      for (int i = 0; i < n; ++i) T(i, u) = col[i];
      p.transition.push_back(T);
      p.obs.push_back(Eigen::MatrixXd::Ones(n, 1));
    }
    auto bd = rng.dirichlet(n - 1);
    Belief b0(n);
    for (int i = 0; i < n - 1; ++i) b0(i) = 0.9 * bd[i];
    b0(u) = 0.1;
    p.initial_belief = b0;
    p.validate();

    SafetyProperty prop;
    prop.unsafe_states = {u};
    prop.lambda = 0.35;
    const int tau = 3 + k % 3;
    auto cert = verify_safety(p, b0, prop, tau, 1);
    if (!cert) cert = verify_safety(p, b0, prop, tau, 2);
    if (!cert) return {false, "no certificate for designed-safe model " +
                              std::to_string(k)};
    ++certified;
    try {
      validate_certificate(*cert, p, 10000, 404 + k);
    } catch (const ValidationFailure& e) {
      return {false, "certificate audit failed on model " + std::to_string(k) +
                     ": " + e.what()};
    }
    // Monte-Carlo: the certified bound is never violated at the horizon.
    for (int run = 0; run < 500; ++run) {
      Trajectory t = simulate(p, UniformActions{}, tau,
                              splitmix64(404 * 1000003ULL + k * 977ULL + run));
      double mass = t.beliefs.back()(u);
      if (mass > worst_mass) worst_mass = mass;
      if (mass > prop.lambda + 1e-8)
        return {false, "certified bound violated by simulation on model " +
                       std::to_string(k) + " (mass " + fmt(mass) + ")"};
    }
  }
  tr << "c4 certified=" << certified << " worst_mass=" << fmt(worst_mass) << "\n";
  return {certified == 20,
          "20/20 certified, audited, and confirmed by 10000 trajectories "
          "(worst unsafe mass " + fmt(worst_mass) + " vs lambda 0.35)"};
}

// ---------------------------------------------------------------------------
// 5. The simplex solver agrees with brute-force vertex enumeration on 200
//    random bounded LPs, and every infeasible verdict carries a checkable
//    Farkas vector.
Outcome criterion5(std::ostream& tr) {
  Rng rng(505);
  int feasible = 0, infeasible = 0;
  double worst_gap = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_u64() % 5);
    const int extra = 1 + static_cast<int>(rng.next_u64() % 4);
    const int m = 2 * n + extra;  // box rows + random cuts, <= 10 over the box
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, n);
    Eigen::VectorXd b(m), c(n);
    for (int j = 0; j < n; ++j) {
      A(2 * j, j) = 1.0;
      b(2 * j) = 1.0;
      A(2 * j + 1, j) = -1.0;
      b(2 * j + 1) = 1.0;
      c(j) = rng.next_double() * 2 - 1;
    }
    for (int i = 2 * n; i < m; ++i) {
      for (int j = 0; j < n; ++j) A(i, j) = rng.next_double() * 2 - 1;
      b(i) = rng.next_double() * 2 - 1;
    }

    // Oracle: enumerate all n-subsets of rows as candidate active sets.
    std::optional<double> best;
    std::vector<int> comb(n);
    for (int i = 0; i < n; ++i) comb[i] = i;
    while (true) {
      Eigen::MatrixXd M(n, n);
      Eigen::VectorXd rhs(n);
      for (int i = 0; i < n; ++i) {
        M.row(i) = A.row(comb[i]);
        rhs(i) = b(comb[i]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
      if (lu.isInvertible()) {
        Eigen::VectorXd x = lu.solve(rhs);
        bool ok = true;
        for (int i = 0; i < m && ok; ++i)
          if (A.row(i).dot(x) > b(i) + 1e-9) ok = false;
        if (ok) {
          double v = c.dot(x);
          if (!best || v < *best) best = v;
        }
      }
      int k = n - 1;
      while (k >= 0 && comb[k] == m - n + k) --k;
      if (k < 0) break;
      ++comb[k];
      for (int i = k + 1; i < n; ++i) comb[i] = comb[i - 1] + 1;
    }

    LinearProgram lp;
    for (int j = 0; j < n; ++j) lp.add_var("x" + std::to_string(j));
    for (int i = 0; i < m; ++i) {
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < n; ++j)
        if (A(i, j) != 0.0) row.push_back({j, A(i, j)});
      lp.add_row(std::move(row), Rel::Le, b(i));
    }
    lp.objective.assign(n, 0.0);
    for (int j = 0; j < n; ++j) lp.objective[j] = c(j);
    LpSolution sol = solve(lp);

    if (best) {
      if (sol.status != LpStatus::Feasible)
        return {false, "solver missed a feasible LP (trial " +
                       std::to_string(trial) + ")"};
      double gap = std::abs(sol.objective_value - *best);
      if (gap > worst_gap) worst_gap = gap;
      if (gap > 1e-6)
        return {false, "objective gap " + fmt(gap) + " on trial " +
                       std::to_string(trial)};
      ++feasible;
    } else {
      if (sol.status != LpStatus::Infeasible)
        return {false, "solver claimed feasible on an infeasible LP (trial " +
                       std::to_string(trial) + ")"};
      Standardized sf = standardize(lp);
      Eigen::Map<const Eigen::VectorXd> y(sol.farkas.data(), sf.A.rows());
      Eigen::VectorXd yA = sf.A.transpose() * y;
      if (yA.minCoeff() < -1e-7 || y.dot(sf.b) >= 0.0)
        return {false, "invalid Farkas vector on trial " + std::to_string(trial)};
      ++infeasible;
    }
  }
  tr << "c5 feasible=" << feasible << " infeasible=" << infeasible
     << " worst_gap=" << fmt(worst_gap) << "\n";
  return {feasible + infeasible == 200 && feasible > 50 && infeasible > 5,
          std::to_string(feasible) + " feasible (worst objective gap " +
              fmt(worst_gap) + "), " + std::to_string(infeasible) +
              " infeasible with verified Farkas vectors"};
}

// ---------------------------------------------------------------------------
// 6. 100 random polynomials certified nonnegative on the simplex stay above
//    -1e-8 at 10^4 Dirichlet samples each, and every cone identity survives
//    the exact rational re-check.
Outcome criterion6(std::ostream& tr) {
  Rng rng(606);
  double worst_eval = 1e300, worst_residual = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int mv = 1 + static_cast<int>(rng.next_u64() % 3);
    const int deg = 2 + static_cast<int>(rng.next_u64() % 2);
    auto vars = belief_vars(mv);
    Poly q(vars);
    std::vector<Monomial> basis = monomial_basis(mv, deg);
    for (const auto& mono : basis)
      q.add_term(mono, rng.next_double() * 2 - 1);

    // Shift the polynomial positive on the simplex (sampled minimum).
    double lo = 1e300;
    for (int s = 0; s < 2000; ++s) {
      auto pt = rng.dirichlet(mv + 1);
      pt.resize(mv);
      lo = std::min(lo, q.eval(pt));
    }
    auto gens = simplex_generators(vars);
    std::optional<ConcreteWitness> witness;
    Poly p(vars);
    for (double bump : {0.01, 0.5, 2.0}) {
      p = q + Poly::constant(vars, -lo + bump);
      ProgramBuilder builder;
      PsatzOptions po;
      po.handelman_degree = deg + 2;
      WitnessPlan plan = encode_psatz(builder, LinPoly::fixed(p), gens, po);
      LpSolution sol = solve(builder.program());
      if (sol.status != LpStatus::Feasible) continue;
      ConcreteWitness w = concretize(plan, sol.assignment);
      if (check_witness(w).ok) {
        witness = std::move(w);
        break;
      }
    }
    if (!witness)
      return {false, "no certifiable shift for random polynomial " +
                     std::to_string(i)};
    WitnessCheck chk = check_witness(*witness);
    worst_residual = std::max(worst_residual, chk.identity_residual);

    Rng sampler(606 * 1009 + i);
    for (int s = 0; s < 10000; ++s) {
      auto pt = sampler.dirichlet(mv + 1);
      pt.resize(mv);
      double v = p.eval(pt);
      if (v < worst_eval) worst_eval = v;
    }
  }
  tr << "c6 worst_eval=" << fmt(worst_eval)
     << " worst_residual=" << fmt(worst_residual) << "\n";
  return {worst_eval >= -1e-8 && worst_residual <= 1e-7,
          "worst sampled value " + fmt(worst_eval) + ", worst rational identity "
          "residual " + fmt(worst_residual) + " over 100 certificates"};
}

// ---------------------------------------------------------------------------
// 7. Reward-tube certification of the constant-reward sanity family, with
//    Monte-Carlo confirmation that cumulative rewards never exceed the bound.
Outcome criterion7(std::ostream& tr) {
  std::vector<std::pair<std::string, Pomdp>> models;
  {
    Pomdp drain;
    drain.states = {"s0", "s1"};
    drain.actions = {"a"};
    drain.observations = {"z"};
    Eigen::MatrixXd T(2, 2);
    T << 1.0, 0.5, 0.0, 0.5;
    drain.transition = {T};
    drain.obs = {Eigen::MatrixXd::Ones(2, 1)};
    drain.initial_belief = Belief{{0.4, 0.6}};
    drain.validate();
    models.push_back({"drain", drain});
  }
  models.push_back({"ad", build_ad_pomdp()});

  const int tau = 3;
  const double gamma = tau + 1;  // R == 1 accumulates exactly gamma
  double worst_total = -1e300;
  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    const Pomdp& p = models[mi].second;
    Eigen::MatrixXd R = Eigen::MatrixXd::Ones(p.n_states(), p.n_actions());
    auto cert = verify_optimality(p, p.initial_belief, R, gamma, std::nullopt,
                                  tau, 1);
    if (!cert)
      return {false, "constant-reward model '" + models[mi].first +
                     "' not certified"};
    try {
      validate_certificate(*cert, p, 2000, 707 + mi);
    } catch (const ValidationFailure& e) {
      return {false, "optimality certificate audit failed on '" +
                     models[mi].first + "': " + e.what()};
    }
    for (int run = 0; run < 5000; ++run) {
      Trajectory t = simulate(p, UniformActions{}, tau,
                              splitmix64(707 * 1000003ULL + mi * 131ULL + run));
      double total = 0.0;
      for (int s = 0; s <= tau; ++s) {
        int a = s < tau ? t.actions[s] : t.actions.empty() ? 0 : t.actions.back();
        total += t.beliefs[s].dot(R.col(a));
      }
      if (total > worst_total) worst_total = total;
      if (total > gamma + 1e-8)
        return {false, "cumulative reward " + fmt(total) + " exceeds gamma on '" +
                       models[mi].first + "'"};
    }
  }
  tr << "c7 worst_total=" << fmt(worst_total) << "\n";
  return {true, "both sanity models certified; max simulated cumulative reward " +
                fmt(worst_total) + " <= gamma " + fmt(gamma) +
                " over 10000 runs"};
}

struct CriterionRun {
  Outcome outcome;
  double seconds = 0.0;
};

std::vector<CriterionRun> run_all(std::string& transcript) {
  std::ostringstream tr;
  std::vector<CriterionRun> out;
  Outcome (*fns[])(std::ostream&) = {criterion1, criterion2, criterion3,
                                     criterion4, criterion5, criterion6,
                                     criterion7};
  for (auto* fn : fns) {
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn(tr);
    } catch (const std::exception& e) {
      o = {false, std::string("unexpected exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    std::fprintf(stderr, "[accept] criterion %zu: %s (%.1f s)\n", out.size() + 1,
                 o.pass ? "pass" : "FAIL", secs);
    out.push_back({o, secs});
  }
  transcript = tr.str();
  return out;
}

}  // namespace

int main() {
  const double budgets[] = {5, 1, 600, 900, 30, 120, 120};

  std::string first_tr, second_tr;
  auto first = run_all(first_tr);
  auto second = run_all(second_tr);

  bool all = true;
  for (int i = 0; i < 7; ++i) {
    bool pass = first[i].outcome.pass && first[i].seconds < budgets[i] &&
                second[i].outcome.pass;
    all = all && pass;
    std::printf("%s  criterion %d: %s (%.1f s)\n", pass ? "PASS" : "FAIL", i + 1,
                first[i].outcome.detail.c_str(), first[i].seconds);
  }
  bool det = first_tr == second_tr;
  for (int i = 0; i < 7 && det; ++i)
    det = first[i].outcome.pass == second[i].outcome.pass;
  all = all && det;
  std::printf("%s  criterion 8: repeated runs of criteria 1-7 %s\n",
              det ? "PASS" : "FAIL",
              det ? "are byte-identical" : "diverged between runs");
  if (!det) {
    std::printf("--- first transcript ---\n%s--- second transcript ---\n%s",
                first_tr.c_str(), second_tr.c_str());
  }
  return all ? 0 : 1;
}
