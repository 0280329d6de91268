#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace bcert {

enum class Rel { Le, Ge, Eq };

// Minimization LP over named variables. Variables are FREE by default (the
// Psatz compiler emits signed coefficient symbols); bounds are optional.
struct LinearProgram {
  static constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<std::string> var_names;
  std::vector<double> lower;  // -inf when absent
  std::vector<double> upper;  // +inf when absent

  struct Row {
    std::vector<std::pair<int, double>> coeffs;  // (variable index, value)
    Rel rel;
    double rhs;
    std::string name;
  };
  std::vector<Row> rows;
  std::vector<double> objective;  // minimize c.x; empty => pure feasibility

  std::size_t n_vars() const { return var_names.size(); }

  int add_var(std::string name, double lo = -inf, double hi = inf) {
    var_names.push_back(std::move(name));
    lower.push_back(lo);
    upper.push_back(hi);
    return static_cast<int>(var_names.size()) - 1;
  }

  void add_row(std::vector<std::pair<int, double>> coeffs, Rel rel, double rhs,
               std::string name = "") {
    if (name.empty()) name = "R" + std::to_string(rows.size() + 1);
    rows.push_back({std::move(coeffs), rel, rhs, std::move(name)});
  }

  void set_objective_coeff(int var, double c) {
    if (objective.size() < n_vars()) objective.resize(n_vars(), 0.0);
    objective[var] = c;
  }
};

// Equality standard form min c.X s.t. A X = b, X >= 0, b >= 0, obtained by
// shifting lower bounds, splitting free variables, turning finite upper
// bounds into rows, and adding slack/surplus columns. The Farkas certificate
// in LpSolution refers to the rows of THIS system.
struct Standardized {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  double obj_offset = 0.0;

  // Original variable j recovers as shift + X[pos] - X[neg] (index -1 = absent).
  struct VarMap {
    int pos = -1;
    int neg = -1;
    double shift = 0.0;
  };
  std::vector<VarMap> vars;
};

Standardized standardize(const LinearProgram& lp);

enum class LpStatus { Feasible, Infeasible, Unbounded };

struct SolveOptions {
  double tol = 1e-7;       // feasibility / reduced-cost tolerance
  double pivot_tol = 1e-7; // minimum pivot magnitude (small pivots amplify roundoff)
  int max_iters = 200000;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> assignment;  // per original variable, when feasible
  double objective_value = 0.0;
  // When infeasible: y with y.A >= -tol componentwise and y.b < 0, over the
  // standardized system (see Standardized).
  std::vector<double> farkas;
};

// Two-phase dense primal simplex. Deterministic: Dantzig entering rule with
// lowest-index tie-breaks, switching to Bland's rule after a stall to rule
// out cycling. Throws IterationLimit when the pivot budget runs out.
LpSolution solve(const LinearProgram& lp, const SolveOptions& options = {});

// Fixed-format MPS with wide numeric fields (17 significant digits, so a
// round trip is exact). Free variables get explicit FR bound lines because
// the MPS default is x >= 0.
void export_mps(const LinearProgram& lp, const std::string& path);
std::string to_mps(const LinearProgram& lp);
LinearProgram import_mps(const std::string& path);
LinearProgram parse_mps(std::istream& in);

}  // namespace bcert
