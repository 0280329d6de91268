#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bcert/case_studies.hpp"

using namespace bcert;

TEST_CASE("ad model observation table matches the printed values") {
  Pomdp p = build_ad_pomdp();
  const double expected[3][3] = {
      {0.8571, 0.1383, 0.0046},
      {0.4335, 0.4559, 0.1106},
      {0.1512, 0.4551, 0.3937},
  };
  for (int q = 0; q < 3; ++q) {
    // The printed z3 column is the complement of the *rounded* z1/z2 entries,
    // so it carries up to two quanta of print rounding.
    CHECK(std::abs(p.obs[0](q, 0) - expected[q][0]) <= 5e-5);
    CHECK(std::abs(p.obs[0](q, 1) - expected[q][1]) <= 5e-5);
    CHECK(std::abs(p.obs[0](q, 2) - expected[q][2]) <= 1.1e-4);
    CHECK(p.obs[0].row(q).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(p.obs[0] == p.obs[1]);  // observations do not depend on the action
}

TEST_CASE("low-bucket entry equals the analytic Poisson partial sum") {
  // sum_{j<=3} 2^j e^{-2} / j! = e^{-2} (1 + 2 + 2 + 4/3)
  double analytic = std::exp(-2.0) * (1.0 + 2.0 + 2.0 + 4.0 / 3.0);
  CHECK(std::abs(analytic - 0.8571) <= 5e-5);
  Pomdp p = build_ad_pomdp();
  CHECK(p.obs[0](0, 0) == doctest::Approx(analytic).epsilon(1e-12));
}

TEST_CASE("threshold boundaries collapse the buckets consistently") {
  AdSchedulingSpec spec;
  spec.gamma1 = 0;
  spec.gamma2 = 300;  // effectively infinite
  Pomdp p = build_ad_pomdp(spec);
  for (int q = 0; q < 3; ++q) {
    CHECK(p.obs[0](q, 0) == doctest::Approx(std::exp(-spec.poisson_rates[q])));
    CHECK(p.obs[0](q, 2) == doctest::Approx(0.0));
  }
}

TEST_CASE("ad model structure and initial-belief variants") {
  Pomdp p = build_ad_pomdp();
  CHECK(p.n_states() == 3);
  CHECK(p.n_actions() == 2);
  CHECK(p.n_observations() == 3);
  CHECK(p.initial_belief(0) == doctest::Approx(1.0 / 3.0));

  AdSchedulingSpec spec;
  spec.uniform_initial = false;
  Pomdp q = build_ad_pomdp(spec);
  CHECK(q.initial_belief(0) == 1.0);

  spec.gamma1 = 7;
  CHECK_THROWS_AS(build_ad_pomdp(spec), std::invalid_argument);
}

TEST_CASE("threshold policy switches at b(q1)+b(q2) = 0.5") {
  auto pol = ad_threshold_policy();
  CHECK(policy_action(pol, Belief{{0.2, 0.2, 0.6}}) == 0);  // low+medium mass small
  CHECK(policy_action(pol, Belief{{0.4, 0.4, 0.2}}) == 1);
  CHECK(policy_action(pol, Belief{{0.25, 0.25, 0.5}}) == 0);  // boundary inclusive
}

TEST_CASE("1x2 lattice: ruling out the current hypothesis forces the move") {
  LatticeTeachingSpec spec;
  spec.width = 2;
  spec.height = 1;
  spec.h0 = {1, 1};
  spec.target = {1, 2};
  Pomdp p = build_lattice_pomdp(spec);
  REQUIRE(p.n_states() == 2);
  int x0 = lattice_state(spec, {1, 1});
  CHECK(x0 == 0);
  CHECK(lattice_state(spec, {1, 2}) == 1);
  // showing the example at cell (1,1) rules hypothesis 0 out
  CHECK(p.transition[x0](1, 0) == 1.0);
  CHECK(p.transition[x0](0, 0) == 0.0);
  // the surviving hypothesis stays put
  CHECK(p.transition[x0](1, 1) == 1.0);
}

TEST_CASE("consistent example leaves the learner in place") {
  Pomdp p = build_lattice_pomdp();
  for (int x = 0; x < 16; ++x)
    for (int h = 0; h < 16; ++h)
      if (h != x) CHECK(p.transition[x](h, h) == 1.0);
}

TEST_CASE("4x4 transitions stay inside the version space") {
  LatticeTeachingSpec spec;  // 4x4 defaults
  Pomdp p = build_lattice_pomdp(spec);
  REQUIRE(p.n_states() == 16);
  for (int x = 0; x < 16; ++x) {
    for (int h = 0; h < 16; ++h) {
      CHECK(p.transition[x].col(h).sum() == doctest::Approx(1.0));
      // support never includes the ruled-out hypothesis
      CHECK(p.transition[x](x, h) == (h == x ? 0.0 : p.transition[x](x, h)));
      CHECK(p.transition[x](x, x) == 0.0);
    }
    // contradicted learner jumps only to l1-nearest survivors
    int r = x / 4, c = x % 4;
    for (int s = 0; s < 16; ++s) {
      if (p.transition[x](s, x) <= 0.0) continue;
      int dist = std::abs(s / 4 - r) + std::abs(s % 4 - c);
      CHECK(dist == 1);  // on a lattice the nearest survivor is a neighbor
    }
  }
}

TEST_CASE("deterministic labels: +1 exactly on consistent hypotheses") {
  Pomdp p = build_lattice_pomdp();
  for (int x = 0; x < 16; ++x)
    for (int h = 0; h < 16; ++h) {
      CHECK(p.obs[x](h, 1) == (h == x ? 0.0 : 1.0));
      CHECK(p.obs[x](h, 0) == (h == x ? 1.0 : 0.0));
    }
}

TEST_CASE("lattice model is invariant under the diagonal symmetry") {
  // Transposing the lattice fixes h0 = (1,1) and target = (3,3); the
  // relabeled model must be isomorphic to the original.
  LatticeTeachingSpec spec;
  Pomdp p = build_lattice_pomdp(spec);
  auto sigma = [&](int s) { return (s % 4) * 4 + s / 4; };  // (r,c) -> (c,r)
  for (int x = 0; x < 16; ++x)
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j)
        CHECK(p.transition[sigma(x)](sigma(i), sigma(j)) ==
              doctest::Approx(p.transition[x](i, j)));
  CHECK(p.initial_belief(sigma(lattice_state(spec, spec.h0))) == 1.0);
}

TEST_CASE("degenerate lattice specs are rejected") {
  LatticeTeachingSpec spec;
  spec.h0 = spec.target;
  CHECK_THROWS_AS(build_lattice_pomdp(spec), std::invalid_argument);
  LatticeTeachingSpec tiny;
  tiny.width = 1;
  tiny.height = 1;
  tiny.h0 = {1, 1};
  tiny.target = {1, 1};
  CHECK_THROWS_AS(build_lattice_pomdp(tiny), std::invalid_argument);
  LatticeTeachingSpec oob;
  oob.target = {5, 5};
  CHECK_THROWS_AS(build_lattice_pomdp(oob), std::invalid_argument);
}
