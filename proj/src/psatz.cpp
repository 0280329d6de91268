#include "bcert/psatz.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

#include "bcert/errors.hpp"

namespace bcert {

using boost::multiprecision::cpp_rational;
using RatPoly = PolynomialT<cpp_rational>;

namespace {

Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial m(a.exps);
  for (std::size_t v = 0; v < m.exps.size(); ++v) m.exps[v] += b.exps[v];
  return m;
}

}  // namespace

LinPoly LinPoly::fixed(const Poly& p) {
  LinPoly r(p.vars());
  for (const auto& [m, c] : p.terms()) r.terms_.emplace(m, LinExpr(c));
  return r;
}

LinPoly LinPoly::scaled(const Poly& p, int symbol) {
  LinPoly r(p.vars());
  for (const auto& [m, c] : p.terms()) r.terms_.emplace(m, LinExpr::sym(symbol, c));
  return r;
}

unsigned LinPoly::degree() const {
  unsigned d = 0;
  for (const auto& [m, e] : terms_) d = std::max(d, m.degree());
  return d;
}

void LinPoly::add_term(Monomial m, LinExpr e) {
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    if (!e.empty()) terms_.emplace(std::move(m), std::move(e));
  } else {
    it->second += e;
    if (it->second.empty()) terms_.erase(it);
  }
}

LinPoly& LinPoly::operator+=(const LinPoly& o) {
  if (vars_.empty()) vars_ = o.vars_;
  for (const auto& [m, e] : o.terms_) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, e);
    } else {
      it->second += e;
      if (it->second.empty()) terms_.erase(it);
    }
  }
  return *this;
}

LinPoly& LinPoly::operator-=(const LinPoly& o) {
  if (vars_.empty()) vars_ = o.vars_;
  for (const auto& [m, e] : o.terms_) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      LinExpr neg;
      neg -= e;
      terms_.emplace(m, std::move(neg));
    } else {
      it->second -= e;
      if (it->second.empty()) terms_.erase(it);
    }
  }
  return *this;
}

LinPoly LinPoly::times(const Poly& p) const {
  LinPoly r(vars_);
  for (const auto& [mp, cp] : p.terms())
    for (const auto& [m, e] : terms_) r.add_term(mono_mul(m, mp), e * cp);
  return r;
}

Poly LinPoly::instantiate(const std::vector<double>& assignment) const {
  Poly r(vars_);
  for (const auto& [m, e] : terms_) {
    double v = e.constant;
    for (auto [id, c] : e.coeffs) v += c * assignment.at(id);
    if (v != 0.0) r.add_term(m, v);
  }
  return r;
}

void ProgramBuilder::add_row(const LinExpr& expr, Rel rel, double rhs,
                             const std::string& name) {
  std::vector<std::pair<int, double>> coeffs(expr.coeffs.begin(), expr.coeffs.end());
  lp_.add_row(std::move(coeffs), rel, rhs - expr.constant, name);
}

void ProgramBuilder::require_zero(const LinPoly& p, const std::string& tag) {
  int k = 0;
  for (const auto& [m, e] : p.terms())
    add_row(e, Rel::Eq, 0.0, tag + "_m" + std::to_string(k++));
}

LinPoly ProgramBuilder::add_dsos(const std::vector<std::string>& vars,
                                 const std::vector<Monomial>& half_basis,
                                 GramBlock& out, const std::string& prefix) {
  const std::size_t k = half_basis.size();
  out.half_basis = half_basis;
  out.symbols.assign(k, {});
  for (std::size_t i = 0; i < k; ++i) {
    out.symbols[i].resize(i + 1);
    for (std::size_t j = 0; j <= i; ++j)
      out.symbols[i][j] = new_var(prefix + "_g" + std::to_string(i) + "_" + std::to_string(j));
  }
  // |G_ij| <= u_ij, row sums of u bounded by the diagonal.
  std::vector<LinExpr> rowsum(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      int u = new_var(prefix + "_u" + std::to_string(i) + "_" + std::to_string(j), 0.0);
      int g = out.symbols[i][j];
      LinExpr le = LinExpr::sym(g);
      le -= LinExpr::sym(u);
      add_row(le, Rel::Le, 0.0);  // G <= u
      LinExpr le2 = LinExpr::sym(g, -1.0);
      le2 -= LinExpr::sym(u);
      add_row(le2, Rel::Le, 0.0);  // -G <= u
      rowsum[i] += LinExpr::sym(u);
      rowsum[j] += LinExpr::sym(u);
    }
  for (std::size_t i = 0; i < k; ++i) {
    LinExpr dom = rowsum[i];
    dom -= LinExpr::sym(out.symbols[i][i]);
    add_row(dom, Rel::Le, 0.0);  // sum_{j != i} u_ij <= G_ii
  }

  LinPoly s(vars);
  for (std::size_t i = 0; i < k; ++i) {
    s.add_term(mono_mul(half_basis[i], half_basis[i]), LinExpr::sym(out.symbols[i][i]));
    for (std::size_t j = 0; j < i; ++j)
      s.add_term(mono_mul(half_basis[i], half_basis[j]),
                 LinExpr::sym(out.symbols[i][j], 2.0));
  }
  return s;
}

void ProgramBuilder::set_objective(const LinExpr& expr) {
  lp_.objective.assign(lp_.n_vars(), 0.0);
  for (auto [id, c] : expr.coeffs) lp_.objective[id] = c;
}

std::vector<Poly> simplex_generators(const std::vector<std::string>& vars) {
  std::vector<Poly> gens;
  Poly rest = Poly::constant(vars, 1.0);
  for (const auto& v : vars) {
    Poly y = Poly::variable(vars, v);
    gens.push_back(y);
    rest = rest - y;
  }
  gens.push_back(rest);
  return gens;
}

namespace {

void enumerate_products(const std::vector<Poly>& gens, unsigned max_degree,
                        std::size_t from, const Poly& acc, unsigned used, bool any,
                        std::vector<Poly>& out) {
  if (any) out.push_back(acc);
  for (std::size_t i = from; i < gens.size(); ++i) {
    unsigned dg = std::max(1u, gens[i].degree());
    if (used + dg > max_degree) continue;
    enumerate_products(gens, max_degree, i, acc * gens[i], used + dg, true, out);
  }
}

}  // namespace

WitnessPlan encode_psatz(ProgramBuilder& builder, const LinPoly& target,
                         const std::vector<Poly>& generators,
                         const PsatzOptions& opt, const std::string& prefix) {
  WitnessPlan plan;
  plan.target = target;
  plan.margin = opt.margin;
  const auto& vars = target.vars();
  const unsigned degT = target.degree();

  int hd0 = opt.s0_half_degree >= 0 ? opt.s0_half_degree
                                    : static_cast<int>((degT + 1) / 2);
  if (2u * static_cast<unsigned>(hd0) < degT)
    throw DegreeMismatch("s0 half-degree " + std::to_string(hd0) +
                         " cannot reach target degree " + std::to_string(degT));

  LinPoly residual = target;
  residual -= LinPoly::fixed(Poly::constant(vars, opt.margin));

  {
    GramBlock block;
    LinPoly s0 = builder.add_dsos(vars, monomial_basis(vars.size(), hd0), block,
                                  prefix + "_s0");
    block.generator = Poly::constant(vars, 1.0);
    residual -= s0;
    plan.blocks.push_back(std::move(block));
  }

  for (std::size_t gi = 0; gi < generators.size(); ++gi) {
    Poly g = generators[gi].with_vars(vars);
    int hd = opt.mult_half_degree;
    if (hd < 0) {
      int room = static_cast<int>(degT) - static_cast<int>(g.degree());
      if (room < 0) continue;  // this generator cannot appear at this degree
      hd = room / 2;
    } else if (static_cast<unsigned>(2 * hd) + g.degree() > std::max(degT, 2u * hd0)) {
      throw DegreeMismatch("multiplier degree overflows the identity degree");
    }
    GramBlock block;
    LinPoly s = builder.add_dsos(vars, monomial_basis(vars.size(), hd), block,
                                 prefix + "_s" + std::to_string(gi + 1));
    block.generator = g;
    residual -= s.times(g);
    plan.blocks.push_back(std::move(block));
  }

  if (opt.handelman && !generators.empty()) {
    unsigned hmax = opt.handelman_degree >= 0
                        ? static_cast<unsigned>(opt.handelman_degree)
                        : degT;
    std::vector<Poly> prods;
    std::vector<Poly> gens_aligned;
    for (const auto& g : generators) gens_aligned.push_back(g.with_vars(vars));
    enumerate_products(gens_aligned, hmax, 0, Poly::constant(vars, 1.0), 0, false,
                       prods);
    int k = 0;
    for (const auto& prod : prods) {
      int c = builder.new_var(prefix + "_h" + std::to_string(k++), 0.0);
      residual -= LinPoly::scaled(prod, c);
      plan.products.push_back({c, prod});
    }
  }

  builder.require_zero(residual, prefix);
  return plan;
}

Poly instantiate_target(const WitnessPlan& plan, const std::vector<double>& assignment) {
  return plan.target.instantiate(assignment);
}

ConcreteWitness concretize(const WitnessPlan& plan, const std::vector<double>& assignment) {
  ConcreteWitness w;
  w.target = plan.target.instantiate(assignment);
  w.margin = plan.margin;
  for (const auto& block : plan.blocks) {
    ConcreteWitness::Block cb;
    cb.half_basis = block.half_basis;
    cb.generator = block.generator;
    const std::size_t k = block.half_basis.size();
    cb.gram = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        cb.gram(i, j) = cb.gram(j, i) = assignment.at(block.symbols[i][j]);
    w.blocks.push_back(std::move(cb));
  }
  for (const auto& [sym, prod] : plan.products)
    w.products.push_back({assignment.at(sym), prod});
  return w;
}

WitnessCheck check_witness(const ConcreteWitness& w, double tol) {
  WitnessCheck out;
  const auto& vars = w.target.vars();

  // Exact reconstruction: every double becomes the rational it denotes.
  RatPoly residual = w.target.convert<cpp_rational>();
  residual.add_term(Monomial(vars.size()), cpp_rational(-w.margin));

  for (const auto& block : w.blocks) {
    const std::size_t k = block.half_basis.size();
    // Diagonal dominance of the Gram matrix.
    for (std::size_t i = 0; i < k; ++i) {
      double slack = block.gram(i, i);
      for (std::size_t j = 0; j < k; ++j)
        if (j != i) slack -= std::abs(block.gram(i, j));
      if (slack < out.dominance_slack) out.dominance_slack = slack;
      if (slack < -tol) {
        out.ok = false;
        out.detail = "Gram matrix not diagonally dominant (slack " +
                     std::to_string(slack) + ")";
      }
    }
    // s = basis' G basis, exactly.
    RatPoly s(vars);
    for (std::size_t i = 0; i < k; ++i) {
      s.add_term(mono_mul(block.half_basis[i], block.half_basis[i]),
                 cpp_rational(block.gram(i, i)));
      for (std::size_t j = 0; j < i; ++j)
        s.add_term(mono_mul(block.half_basis[i], block.half_basis[j]),
                   cpp_rational(2) * cpp_rational(block.gram(i, j)));
    }
    residual = residual - s * block.generator.convert<cpp_rational>().with_vars(vars);
  }

  for (const auto& [c, prod] : w.products) {
    if (c < -tol) {
      out.ok = false;
      out.detail = "negative generator-product coefficient";
    }
    residual = residual - prod.convert<cpp_rational>().with_vars(vars) * cpp_rational(c);
  }

  for (const auto& [m, c] : residual.terms()) {
    double mag = std::abs(static_cast<double>(c));
    if (mag > out.identity_residual) out.identity_residual = mag;
  }
  if (out.identity_residual > tol) {
    out.ok = false;
    out.detail = "cone identity residual " + std::to_string(out.identity_residual);
  }
  return out;
}

}  // namespace bcert
