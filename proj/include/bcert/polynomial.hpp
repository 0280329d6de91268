#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace bcert {

// A monomial is an exponent vector over an ambient ordered variable list.
struct Monomial {
  std::vector<unsigned> exps;

  Monomial() = default;
  explicit Monomial(std::size_t nvars) : exps(nvars, 0u) {}
  explicit Monomial(std::vector<unsigned> e) : exps(std::move(e)) {}

  unsigned degree() const {
    return std::accumulate(exps.begin(), exps.end(), 0u);
  }
  bool operator==(const Monomial& o) const { return exps == o.exps; }
};

// Graded lexicographic order, fixed globally for deterministic assembly.
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    unsigned da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return std::lexicographical_compare(a.exps.begin(), a.exps.end(),
                                        b.exps.begin(), b.exps.end());
  }
};

// All monomials in `nvars` variables of total degree <= max_degree,
// in graded-lex order.
std::vector<Monomial> monomial_basis(std::size_t nvars, unsigned max_degree);

// Sparse multivariate polynomial over an ordered variable list.
// Coeff is double for solving, boost cpp_rational for validation.
template <class Coeff>
class PolynomialT {
 public:
  using Terms = std::map<Monomial, Coeff, GrlexLess>;

  PolynomialT() = default;
  explicit PolynomialT(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  static PolynomialT constant(std::vector<std::string> vars, Coeff c) {
    PolynomialT p(std::move(vars));
    p.add_term(Monomial(p.vars_.size()), std::move(c));
    return p;
  }

  static PolynomialT variable(std::vector<std::string> vars, const std::string& name) {
    PolynomialT p(std::move(vars));
    Monomial m(p.vars_.size());
    m.exps.at(p.var_index(name)) = 1;
    p.add_term(std::move(m), Coeff(1));
    return p;
  }

  const std::vector<std::string>& vars() const { return vars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  std::size_t var_index(const std::string& name) const {
    auto it = std::find(vars_.begin(), vars_.end(), name);
    if (it == vars_.end()) throw std::invalid_argument("unknown variable: " + name);
    return static_cast<std::size_t>(it - vars_.begin());
  }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }

  unsigned degree_in(std::size_t var) const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.exps[var]);
    return d;
  }

  void add_term(Monomial m, Coeff c) {
    assert(m.exps.size() == vars_.size());
    auto [it, fresh] = terms_.emplace(std::move(m), c);
    if (!fresh) {
      it->second += c;
      if (it->second == Coeff(0)) terms_.erase(it);
    } else if (it->second == Coeff(0)) {
      terms_.erase(it);
    }
  }

  Coeff coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Coeff(0) : it->second;
  }

  // Evaluation with cached variable powers (cheaper and better conditioned
  // than per-term pow, which the tests use as the independent oracle).
  Coeff eval(const std::vector<Coeff>& point) const {
    if (point.size() != vars_.size())
      throw std::invalid_argument("eval: point/variable dimension mismatch");
    std::vector<std::vector<Coeff>> pow(vars_.size());
    for (std::size_t v = 0; v < vars_.size(); ++v) {
      pow[v].push_back(Coeff(1));
      unsigned dmax = degree_in(v);
      for (unsigned k = 1; k <= dmax; ++k) pow[v].push_back(pow[v].back() * point[v]);
    }
    Coeff acc(0);
    for (const auto& [m, c] : terms_) {
      Coeff t = c;
      for (std::size_t v = 0; v < vars_.size(); ++v)
        if (m.exps[v] != 0) t *= pow[v][m.exps[v]];
      acc += t;
    }
    return acc;
  }

  PolynomialT operator-() const {
    PolynomialT r(vars_);
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
  }

  PolynomialT operator+(const PolynomialT& o) const {
    auto [a, b] = unified(*this, o);
    for (const auto& [m, c] : b.terms_) a.add_term(m, c);
    return a;
  }

  PolynomialT operator-(const PolynomialT& o) const {
    auto [a, b] = unified(*this, o);
    for (const auto& [m, c] : b.terms_) a.add_term(m, -c);
    return a;
  }

  PolynomialT operator*(const PolynomialT& o) const {
    auto [a, b] = unified(*this, o);
    PolynomialT r(a.vars_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        Monomial m(ma.exps);
        for (std::size_t v = 0; v < m.exps.size(); ++v) m.exps[v] += mb.exps[v];
        r.add_term(std::move(m), ca * cb);
      }
    return r;
  }

  PolynomialT operator*(const Coeff& s) const {
    PolynomialT r(vars_);
    if (s == Coeff(0)) return r;
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, c * s);
    return r;
  }

  PolynomialT pow(unsigned k) const {
    PolynomialT r = constant(vars_, Coeff(1));
    for (unsigned i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  // Replace a variable by a polynomial (used for the b_n := 1 - sum b_i
  // elimination and the t -> t-1 time shift). The variable stays in the
  // ambient list; its exponent is just zero everywhere afterwards.
  PolynomialT substitute(const std::string& name, const PolynomialT& repl) const {
    std::size_t v = var_index(name);
    PolynomialT r(vars_);
    unsigned dmax = degree_in(v);
    std::vector<PolynomialT> rp;  // repl^k aligned to our variables
    rp.push_back(constant(vars_, Coeff(1)));
    PolynomialT repl_aligned = constant(vars_, Coeff(0)) + repl;
    for (unsigned k = 1; k <= dmax; ++k) rp.push_back(rp.back() * repl_aligned);
    for (const auto& [m, c] : terms_) {
      Monomial base(m.exps);
      unsigned e = base.exps[v];
      base.exps[v] = 0;
      PolynomialT term(vars_);
      term.add_term(base, c);
      term = term * rp[e];
      for (const auto& [mm, cc] : term.terms_) r.add_term(mm, cc);
    }
    return r;
  }

  // Rename to a target variable universe (a superset, possibly reordered).
  PolynomialT with_vars(const std::vector<std::string>& target) const {
    PolynomialT r(target);
    std::vector<std::size_t> where(vars_.size());
    for (std::size_t v = 0; v < vars_.size(); ++v) {
      auto it = std::find(target.begin(), target.end(), vars_[v]);
      if (it == target.end())
        throw std::invalid_argument("with_vars: target misses " + vars_[v]);
      where[v] = static_cast<std::size_t>(it - target.begin());
    }
    for (const auto& [m, c] : terms_) {
      Monomial mm(target.size());
      for (std::size_t v = 0; v < vars_.size(); ++v) mm.exps[where[v]] = m.exps[v];
      r.add_term(std::move(mm), c);
    }
    return r;
  }

  template <class Other>
  PolynomialT<Other> convert() const {
    PolynomialT<Other> r(vars_);
    for (const auto& [m, c] : terms_) r.add_term(m, Other(c));
    return r;
  }

 private:
  static std::pair<PolynomialT, PolynomialT> unified(const PolynomialT& a,
                                                     const PolynomialT& b) {
    if (a.vars_ == b.vars_) return {a, b};
    std::vector<std::string> u = a.vars_;
    for (const auto& v : b.vars_)
      if (std::find(u.begin(), u.end(), v) == u.end()) u.push_back(v);
    return {a.with_vars(u), b.with_vars(u)};
  }

  std::vector<std::string> vars_;
  Terms terms_;
};

using Poly = PolynomialT<double>;

// Round-trip text form: `c*b1^e1*...` terms joined by +/-, 17 significant
// digits, graded-lex descending.
std::string to_string(const Poly& p);

// Infix parser for the same syntax plus parentheses; `vars` fixes the
// ambient list (any identifier not in it is an error).
Poly parse_poly(const std::string& text, const std::vector<std::string>& vars);

// Convenience: n belief coordinate names b1..bn.
std::vector<std::string> belief_vars(std::size_t n);

}  // namespace bcert
