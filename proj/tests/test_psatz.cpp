#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bcert/errors.hpp"
#include "bcert/psatz.hpp"
#include "bcert/rng.hpp"

using namespace bcert;

namespace {

// Encode one fixed polynomial >= margin on {g >= 0} and solve.
struct Result {
  LpStatus status;
  WitnessPlan plan;
  std::vector<double> assignment;
};

Result certify(const Poly& p, const std::vector<Poly>& gens, PsatzOptions opt = {}) {
  ProgramBuilder b;
  WitnessPlan plan = encode_psatz(b, LinPoly::fixed(p), gens, opt);
  LpSolution sol = solve(b.program());
  return {sol.status, std::move(plan), std::move(sol.assignment)};
}

}  // namespace

TEST_CASE("x^2 is certified globally nonnegative") {
  std::vector<std::string> vars = {"x"};
  Poly x = Poly::variable(vars, "x");
  auto r = certify(x * x, {});
  REQUIRE(r.status == LpStatus::Feasible);
  auto chk = check_witness(r.plan, r.assignment);
  CHECK(chk.ok);
  CHECK(chk.identity_residual <= 1e-7);
}

TEST_CASE("x on the half line needs the generator") {
  std::vector<std::string> vars = {"x"};
  Poly x = Poly::variable(vars, "x");
  auto with_gen = certify(x, {x});
  REQUIRE(with_gen.status == LpStatus::Feasible);
  CHECK(check_witness(with_gen.plan, with_gen.assignment).ok);

  // Globally, x is not nonnegative: every sound relaxation must refuse.
  auto without = certify(x, {});
  CHECK(without.status == LpStatus::Infeasible);
}

TEST_CASE("x - 1 on the half line is out of reach at multiplier degree 0") {
  std::vector<std::string> vars = {"x"};
  Poly x = Poly::variable(vars, "x");
  Poly target = x - Poly::constant(vars, 1.0);
  PsatzOptions opt;
  opt.mult_half_degree = 0;
  opt.handelman = false;
  auto r = certify(target, {x}, opt);
  CHECK(r.status == LpStatus::Infeasible);
}

TEST_CASE("(x+y)^2 is DSOS-feasible, an indefinite form is not") {
  std::vector<std::string> vars = {"x", "y"};
  Poly x = Poly::variable(vars, "x");
  Poly y = Poly::variable(vars, "y");
  auto good = certify((x + y) * (x + y), {});
  REQUIRE(good.status == LpStatus::Feasible);
  CHECK(check_witness(good.plan, good.assignment).ok);

  Poly bad = x * x + y * y - x * y * 3.0;  // value -1 at (1,1)
  CHECK(certify(bad, {}).status == LpStatus::Infeasible);
}

TEST_CASE("duplicate constraints leave feasibility unchanged") {
  std::vector<std::string> vars = {"x"};
  Poly x = Poly::variable(vars, "x");
  ProgramBuilder b;
  auto p1 = encode_psatz(b, LinPoly::fixed(x * x), {}, {}, "c1");
  auto p2 = encode_psatz(b, LinPoly::fixed(x * x), {}, {}, "c2");
  LpSolution sol = solve(b.program());
  REQUIRE(sol.status == LpStatus::Feasible);
  CHECK(check_witness(p1, sol.assignment).ok);
  CHECK(check_witness(p2, sol.assignment).ok);
}

TEST_CASE("degree caps that cannot reach the target throw") {
  std::vector<std::string> vars = {"x"};
  Poly x = Poly::variable(vars, "x");
  PsatzOptions opt;
  opt.s0_half_degree = 1;
  CHECK_THROWS_AS(certify(x.pow(4), {}, opt), DegreeMismatch);
}

TEST_CASE("raising multiplier degrees preserves feasibility") {
  auto vars = belief_vars(2);
  auto gens = simplex_generators(vars);
  // 1/4 - b1*b2 is nonnegative on the simplex slice {b1,b2 >= 0, b1+b2 <= 1}.
  Poly p = Poly::constant(vars, 0.25) -
           Poly::variable(vars, "b1") * Poly::variable(vars, "b2");
  for (int extra = 0; extra <= 2; ++extra) {
    PsatzOptions opt;
    opt.s0_half_degree = 1 + extra;
    opt.mult_half_degree = extra;
    auto r = certify(p, gens, opt);
    REQUIRE(r.status == LpStatus::Feasible);
    CHECK(check_witness(r.plan, r.assignment).ok);
  }
}

TEST_CASE("strictness margin shows up in the identity") {
  auto vars = belief_vars(2);
  auto gens = simplex_generators(vars);
  Poly sum = Poly::variable(vars, "b1") + Poly::variable(vars, "b2");
  PsatzOptions opt;
  opt.margin = 1e-6;
  // b1 + b2 + 2e-6 >= 1e-6 strictly on the simplex slice.
  auto r = certify(sum + Poly::constant(vars, 2e-6), gens, opt);
  REQUIRE(r.status == LpStatus::Feasible);
  CHECK(check_witness(r.plan, r.assignment).ok);

  // b1 + b2 >= 1e-6 fails at the origin vertex; the sound outcome is refusal.
  auto bad = certify(sum, gens, opt);
  CHECK(bad.status == LpStatus::Infeasible);
}

TEST_CASE("certified random polynomials are nonnegative at Dirichlet samples") {
  Rng rng(505);
  auto vars = belief_vars(2);
  auto gens = simplex_generators(vars);
  int certified = 0;
  for (int trial = 0; trial < 10; ++trial) {
    Poly p(vars);
    for (const auto& m : monomial_basis(2, 3))
      p.add_term(m, rng.next_double() * 2 - 1);
    // Shift upward until the DSOS cone accepts it.
    double shift = 0.0;
    Result r = certify(p, gens);
    while (r.status != LpStatus::Feasible && shift < 64.0) {
      shift = shift == 0.0 ? 0.5 : shift * 2;
      r = certify(p + Poly::constant(vars, shift), gens);
    }
    REQUIRE(r.status == LpStatus::Feasible);
    ++certified;
    auto chk = check_witness(r.plan, r.assignment);
    CHECK(chk.ok);
    Poly cert = instantiate_target(r.plan, r.assignment);
    for (int k = 0; k < 500; ++k) {
      auto full = rng.dirichlet(3);
      CHECK(cert.eval({full[0], full[1]}) >= -1e-8);
    }
  }
  CHECK(certified == 10);
}

TEST_CASE("tampered witnesses are rejected") {
  std::vector<std::string> vars = {"x"};
  Poly x = Poly::variable(vars, "x");
  auto r = certify(x * x + Poly::constant(vars, 1.0), {});
  REQUIRE(r.status == LpStatus::Feasible);
  REQUIRE(check_witness(r.plan, r.assignment).ok);
  auto bad = r.assignment;
  bad[0] += 0.1;
  CHECK_FALSE(check_witness(r.plan, bad).ok);
}

TEST_CASE("simplex generators in reduced coordinates") {
  auto gens = simplex_generators(belief_vars(2));
  REQUIRE(gens.size() == 3);
  CHECK(gens[0].eval({0.2, 0.3}) == doctest::Approx(0.2));
  CHECK(gens[2].eval({0.2, 0.3}) == doctest::Approx(0.5));
}
