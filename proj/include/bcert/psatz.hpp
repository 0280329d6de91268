#pragma once

#include <map>
#include <string>
#include <vector>

#include "bcert/lp.hpp"
#include "bcert/polynomial.hpp"

namespace bcert {

// Affine expression over LP decision symbols.
struct LinExpr {
  std::map<int, double> coeffs;  // symbol id -> coefficient
  double constant = 0.0;

  LinExpr() = default;
  /*implicit*/ LinExpr(double c) : constant(c) {}
  static LinExpr sym(int id, double c = 1.0) {
    LinExpr e;
    e.coeffs[id] = c;
    return e;
  }

  LinExpr& operator+=(const LinExpr& o) {
    for (auto [id, c] : o.coeffs) {
      double& v = coeffs[id];
      v += c;
      if (v == 0.0) coeffs.erase(id);
    }
    constant += o.constant;
    return *this;
  }
  LinExpr& operator-=(const LinExpr& o) {
    for (auto [id, c] : o.coeffs) {
      double& v = coeffs[id];
      v -= c;
      if (v == 0.0) coeffs.erase(id);
    }
    constant -= o.constant;
    return *this;
  }
  LinExpr operator*(double s) const {
    LinExpr e;
    if (s == 0.0) return e;
    for (auto [id, c] : coeffs) e.coeffs[id] = c * s;
    e.constant = constant * s;
    return e;
  }
  bool empty() const { return coeffs.empty() && constant == 0.0; }
};

// Polynomial whose coefficients are affine in decision symbols; the bridge
// between polynomial identities and LP rows.
class LinPoly {
 public:
  using Terms = std::map<Monomial, LinExpr, GrlexLess>;

  LinPoly() = default;
  explicit LinPoly(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  // A fixed polynomial (no symbols).
  static LinPoly fixed(const Poly& p);
  // p scaled by one decision symbol.
  static LinPoly scaled(const Poly& p, int symbol);

  const std::vector<std::string>& vars() const { return vars_; }
  const Terms& terms() const { return terms_; }
  unsigned degree() const;

  void add_term(Monomial m, LinExpr e);
  LinPoly& operator+=(const LinPoly& o);
  LinPoly& operator-=(const LinPoly& o);
  LinPoly times(const Poly& p) const;  // multiply by a fixed polynomial

  // Substitute solved symbol values, producing a concrete polynomial.
  Poly instantiate(const std::vector<double>& assignment) const;

 private:
  std::vector<std::string> vars_;
  Terms terms_;
};

// One SOS-multiplier block: a Gram matrix over `half_basis`, DSOS-constrained,
// attached to `generator` (the constant 1 for the free block s0).
struct GramBlock {
  std::vector<Monomial> half_basis;       // over the plan's variable list
  std::vector<std::vector<int>> symbols;  // symbols[i][j], j <= i, Gram entries
  Poly generator;
};

// Everything needed to rebuild and audit one cone membership
//   target = margin + s0 + sum_i s_i * g_i + sum_k c_k * prod_k
// after the LP assigns values to the symbols.
struct WitnessPlan {
  LinPoly target;
  double margin = 0.0;
  std::vector<GramBlock> blocks;
  std::vector<std::pair<int, Poly>> products;  // (coefficient symbol >= 0, g^alpha)
};

class ProgramBuilder {
 public:
  int new_var(const std::string& name, double lo = -LinearProgram::inf,
              double hi = LinearProgram::inf) {
    return lp_.add_var(name, lo, hi);
  }

  // expr rel rhs, constants folded into the right-hand side.
  void add_row(const LinExpr& expr, Rel rel, double rhs, const std::string& name = "");

  // One equality row per monomial of p (p == 0 identically).
  void require_zero(const LinPoly& p, const std::string& tag);

  // Fresh DSOS-constrained Gram block over `half_basis`; the returned
  // LinPoly is the expanded quadratic form basis' * G * basis.
  LinPoly add_dsos(const std::vector<std::string>& vars,
                   const std::vector<Monomial>& half_basis, GramBlock& out,
                   const std::string& prefix);

  // Minimize `expr` (negate it to maximize).
  void set_objective(const LinExpr& expr);

  const LinearProgram& program() const { return lp_; }
  LinearProgram& program() { return lp_; }

 private:
  LinearProgram lp_;
};

struct PsatzOptions {
  int s0_half_degree = -1;    // -1: ceil(deg(target) / 2)
  int mult_half_degree = -1;  // -1: floor((deg(target) - deg(g)) / 2) per generator
  bool handelman = true;      // add generator products with nonnegative scalars
  int handelman_degree = -1;  // -1: deg(target)
  double margin = 0.0;
};

// Encode "target >= margin on {x : g_j(x) >= 0 for all j}" as linear
// constraints via a diagonally-dominant-SOS cone with generator products.
// Throws DegreeMismatch when the requested degree caps cannot reach the
// target's degree.
WitnessPlan encode_psatz(ProgramBuilder& builder, const LinPoly& target,
                         const std::vector<Poly>& generators,
                         const PsatzOptions& options = {},
                         const std::string& prefix = "c");

// Inequality generators of the reduced belief simplex
// {y_i >= 0, 1 - sum y_i >= 0} over variables y = b1..b_{n-1}.
std::vector<Poly> simplex_generators(const std::vector<std::string>& vars);

// A fully solved cone membership with all symbols substituted — what gets
// stored in certificate files and re-audited by check-cert.
struct ConcreteWitness {
  Poly target;
  double margin = 0.0;
  struct Block {
    std::vector<Monomial> half_basis;
    Eigen::MatrixXd gram;
    Poly generator;
  };
  std::vector<Block> blocks;
  std::vector<std::pair<double, Poly>> products;
};

ConcreteWitness concretize(const WitnessPlan& plan, const std::vector<double>& assignment);

// Audit record for one witness.
struct WitnessCheck {
  bool ok = true;
  double identity_residual = 0.0;  // worst rational coefficient residual
  double dominance_slack = 0.0;    // most negative diagonal-dominance slack
  std::string detail;
};

// Verify, in exact rational arithmetic, that
//   target - margin - sum_k basis_k' G_k basis_k * g_k - sum c_j prod_j = 0
// to `tol` coefficient-wise, that every Gram matrix is diagonally dominant,
// and that all product coefficients are nonnegative.
WitnessCheck check_witness(const ConcreteWitness& w, double tol = 1e-7);

inline WitnessCheck check_witness(const WitnessPlan& plan,
                                  const std::vector<double>& assignment,
                                  double tol = 1e-7) {
  return check_witness(concretize(plan, assignment), tol);
}

// The concrete certified polynomial (target with symbols substituted).
Poly instantiate_target(const WitnessPlan& plan, const std::vector<double>& assignment);

}  // namespace bcert
