#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

#include "bcert/polynomial.hpp"
#include "bcert/rational_map.hpp"
#include "bcert/rng.hpp"

using namespace bcert;
using boost::multiprecision::cpp_rational;

namespace {

// Brute-force oracle: per-term std::pow sum, no shared power caching.
double eval_oracle(const Poly& p, const std::vector<double>& pt) {
  double acc = 0.0;
  for (const auto& [m, c] : p.terms()) {
    double t = c;
    for (std::size_t v = 0; v < pt.size(); ++v) t *= std::pow(pt[v], m.exps[v]);
    acc += t;
  }
  return acc;
}

Poly random_poly(Rng& rng, const std::vector<std::string>& vars, unsigned deg) {
  Poly p(vars);
  for (const auto& m : monomial_basis(vars.size(), deg))
    p.add_term(m, rng.next_double() * 4.0 - 2.0);
  return p;
}

}  // namespace

TEST_CASE("monomial basis sizes and order") {
  auto b1 = monomial_basis(2, 1);
  REQUIRE(b1.size() == 3);
  CHECK(b1[0].degree() == 0);
  CHECK(b1[1].exps == std::vector<unsigned>{0, 1});  // grlex: b2 before b1? no:
  // graded lex compares exponent vectors lexicographically, so within degree 1
  // (0,1) < (1,0).
  CHECK(b1[2].exps == std::vector<unsigned>{1, 0});

  CHECK(monomial_basis(3, 2).size() == 10);
  CHECK(monomial_basis(4, 3).size() == 35);

  auto b = monomial_basis(3, 4);
  GrlexLess less;
  for (std::size_t i = 1; i < b.size(); ++i) CHECK(less(b[i - 1], b[i]));
}

TEST_CASE("basic eval") {
  auto vars = belief_vars(2);
  Poly p = Poly::variable(vars, "b1") + Poly::variable(vars, "b2");
  CHECK(p.eval({0.3, 0.7}) == doctest::Approx(1.0).epsilon(1e-15));

  Poly q = Poly::variable(vars, "b1") * Poly::variable(vars, "b1") -
           Poly::variable(vars, "b1") * Poly::variable(vars, "b2") * 2.0;
  CHECK(q.eval({1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("eval matches brute-force oracle on random degree-4 polys") {
  Rng rng(42);
  auto vars = belief_vars(3);
  for (int trial = 0; trial < 10; ++trial) {
    Poly p = random_poly(rng, vars, 4);
    for (int k = 0; k < 100; ++k) {
      std::vector<double> pt = {rng.next_double() * 2 - 1, rng.next_double() * 2 - 1,
                                rng.next_double() * 2 - 1};
      CHECK(std::abs(p.eval(pt) - eval_oracle(p, pt)) < 1e-12);
    }
  }
}

TEST_CASE("arithmetic identities") {
  auto vars = belief_vars(1);
  Poly x = Poly::variable(vars, "b1");
  Poly one = Poly::constant(vars, 1.0);
  Poly prod = (x + one) * (x - one);
  Poly expect = x * x - one;
  CHECK(prod.terms() == expect.terms());

  Rng rng(7);
  Poly p = random_poly(rng, belief_vars(2), 3);
  Poly zero(belief_vars(2));
  CHECK((p + zero).terms() == p.terms());
}

TEST_CASE("ring axioms hold under evaluation") {
  Rng rng(99);
  auto vars = belief_vars(2);
  for (int trial = 0; trial < 20; ++trial) {
    Poly p = random_poly(rng, vars, 2);
    Poly q = random_poly(rng, vars, 2);
    Poly r = random_poly(rng, vars, 2);
    std::vector<double> pt = {rng.next_double(), rng.next_double()};
    CHECK(std::abs((p + q).eval(pt) - (q + p).eval(pt)) < 1e-10);
    CHECK(std::abs((p * q).eval(pt) - (q * p).eval(pt)) < 1e-10);
    CHECK(std::abs(((p * q) * r).eval(pt) - (p * (q * r)).eval(pt)) < 1e-10);
    CHECK(std::abs((p * (q + r)).eval(pt) - (p * q + p * r).eval(pt)) < 1e-10);
    CHECK(std::abs((p * q).eval(pt) - p.eval(pt) * q.eval(pt)) < 1e-10);
  }
}

TEST_CASE("variable union in mixed-variable arithmetic") {
  Poly a = Poly::variable({"b1"}, "b1");
  Poly b = Poly::variable({"b2"}, "b2");
  Poly s = a + b;
  REQUIRE(s.vars().size() == 2);
  CHECK(s.eval({0.25, 0.5}) == doctest::Approx(0.75));
}

TEST_CASE("substitute eliminates a variable") {
  auto vars = belief_vars(3);
  Poly p = Poly::variable(vars, "b3").pow(2) + Poly::variable(vars, "b1");
  Poly repl = Poly::constant(vars, 1.0) - Poly::variable(vars, "b1") -
              Poly::variable(vars, "b2");
  Poly q = p.substitute("b3", repl);
  CHECK(q.degree_in(2) == 0);
  // p(b1,b2,1-b1-b2) == q(b1,b2,*)
  Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    double b1 = rng.next_double(), b2 = rng.next_double() * (1 - b1);
    CHECK(std::abs(q.eval({b1, b2, 0.0}) - p.eval({b1, b2, 1 - b1 - b2})) < 1e-12);
  }
}

TEST_CASE("text round trip") {
  auto vars = belief_vars(2);
  Rng rng(1234);
  for (int trial = 0; trial < 20; ++trial) {
    Poly p = random_poly(rng, vars, 3);
    Poly q = parse_poly(to_string(p), vars);
    REQUIRE(q.terms().size() == p.terms().size());
    for (const auto& [m, c] : p.terms()) CHECK(q.coeff(m) == c);  // exact: %.17g
  }
  Poly z(vars);
  CHECK(parse_poly(to_string(z), vars).is_zero());
}

TEST_CASE("parser handles implicit coefficients, whitespace, parentheses") {
  auto vars = belief_vars(2);
  Poly p = parse_poly("b1^2 - 2*b1*b2 + 1", vars);
  CHECK(p.eval({3.0, 1.0}) == doctest::Approx(4.0));
  Poly q = parse_poly("(b1 + b2)^2 - 0.5", vars);
  CHECK(q.eval({0.5, 0.5}) == doctest::Approx(0.5));
  CHECK_THROWS(parse_poly("b1 + nope", vars));
}

TEST_CASE("rational conversion agrees with float mode") {
  Rng rng(55);
  auto vars = belief_vars(2);
  Poly p = random_poly(rng, vars, 3) * 100.0;
  auto pr = p.convert<cpp_rational>();
  for (const auto& [m, c] : p.terms())
    CHECK(static_cast<double>(pr.coeff(m)) == doctest::Approx(c).epsilon(1e-9));
}

TEST_CASE("compose_cleared: algebraic identities and oracle") {
  auto yv = belief_vars(2);  // reduced coordinates of a 3-state model
  RationalMap f;
  f.numerators = {Poly::variable(yv, "b1") * 0.5,
                  Poly::variable(yv, "b1") * 0.25 + Poly::variable(yv, "b2") * 0.5};
  f.denominator = Poly::constant(yv, 0.2) + Poly::variable(yv, "b1") * 0.5 +
                  Poly::variable(yv, "b2") * 0.3;
  f.validate();

  // Constant V: clearing with d=0 returns the constant itself.
  Poly c = Poly::constant(yv, 3.5);
  CHECK(compose_cleared(c, f).terms() == c.terms());

  // V = b1 with d=1: N * (M1/N) = M1.
  Poly v1 = Poly::variable(yv, "b1");
  CHECK(compose_cleared(v1, f).terms() == f.numerators[0].terms());

  // Random degree-3 V against direct rational evaluation.
  Rng rng(2024);
  Poly V = random_poly(rng, yv, 3);
  Poly out = compose_cleared(V, f);
  CHECK(out.degree() <= 3);
  for (int k = 0; k < 200; ++k) {
    auto full = rng.dirichlet(3);
    std::vector<double> y = {full[0], full[1]};
    double n = f.denominator.eval(y);
    double expect = std::pow(n, 3) * V.eval(f.eval(y));
    CHECK(std::abs(out.eval(y) - expect) < 1e-9);
  }
}

TEST_CASE("rational map validation rejects bad maps") {
  auto yv = belief_vars(1);
  RationalMap bad;
  bad.numerators = {Poly::variable(yv, "b1")};
  bad.denominator = Poly::variable(yv, "b1") - Poly::constant(yv, 0.5);
  CHECK_THROWS(bad.validate());  // negative at the b1=0 vertex

  RationalMap quad;
  quad.numerators = {Poly::variable(yv, "b1")};
  quad.denominator = Poly::variable(yv, "b1") * Poly::variable(yv, "b1") +
                     Poly::constant(yv, 1.0);
  CHECK_THROWS(quad.validate());  // degree 2 denominator
}
