#include "bcert/rational_map.hpp"

#include <stdexcept>

#include "bcert/rng.hpp"

namespace bcert {

void RationalMap::validate() const {
  const std::size_t m = numerators.size();
  if (denominator.is_zero())
    throw std::invalid_argument("rational map denominator is identically zero");
  if (denominator.degree() > 1)
    throw std::invalid_argument("rational map denominator degree exceeds 1");
  for (const auto& num : numerators) {
    if (num.vars() != denominator.vars())
      throw std::invalid_argument("rational map variable mismatch");
    if (num.degree() > 1)
      throw std::invalid_argument("rational map numerator degree exceeds 1");
  }
  // Positivity of N where the map can be applied: simplex vertices plus a
  // fixed-seed Dirichlet sample of the reduced simplex.
  auto check = [&](const std::vector<double>& y) {
    if (denominator.eval(y) < -1e-12)
      throw std::invalid_argument("rational map denominator negative on simplex");
  };
  std::vector<double> y(m, 0.0);
  check(y);  // barycentre of the eliminated vertex
  for (std::size_t i = 0; i < m; ++i) {
    y.assign(m, 0.0);
    y[i] = 1.0;
    check(y);
  }
  Rng rng(0x5eedULL);
  for (int k = 0; k < 1000; ++k) {
    auto full = rng.dirichlet(static_cast<int>(m) + 1);
    check(std::vector<double>(full.begin(), full.end() - 1));
  }
}

std::vector<double> RationalMap::eval(const std::vector<double>& y) const {
  double n = denominator.eval(y);
  std::vector<double> out(numerators.size());
  for (std::size_t i = 0; i < numerators.size(); ++i) out[i] = numerators[i].eval(y) / n;
  return out;
}

Poly compose_cleared(const Poly& V, const RationalMap& f) {
  const unsigned d = V.degree();
  const auto& vars = f.denominator.vars();
  if (V.vars().size() != f.numerators.size())
    throw std::invalid_argument("compose_cleared: V arity != map output arity");

  // Precompute numerator and denominator powers up to d.
  std::vector<std::vector<Poly>> numpow(f.numerators.size());
  for (std::size_t v = 0; v < f.numerators.size(); ++v) {
    numpow[v].push_back(Poly::constant(vars, 1.0));
    for (unsigned k = 1; k <= d; ++k) numpow[v].push_back(numpow[v].back() * f.numerators[v]);
  }
  std::vector<Poly> denpow{Poly::constant(vars, 1.0)};
  for (unsigned k = 1; k <= d; ++k) denpow.push_back(denpow.back() * f.denominator);

  Poly out(vars);
  for (const auto& [m, c] : V.terms()) {
    Poly term = Poly::constant(vars, c);
    unsigned used = 0;
    for (std::size_t v = 0; v < m.exps.size(); ++v) {
      if (m.exps[v] == 0) continue;
      term = term * numpow[v][m.exps[v]];
      used += m.exps[v];
    }
    term = term * denpow[d - used];
    out = out + term;
  }
  return out;
}

}  // namespace bcert
