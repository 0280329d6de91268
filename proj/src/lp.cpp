#include "bcert/lp.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "bcert/errors.hpp"

namespace bcert {

Standardized standardize(const LinearProgram& lp) {
  constexpr double inf = LinearProgram::inf;
  Standardized s;
  s.vars.resize(lp.n_vars());

  // Column layout: one or two columns per original variable, then one extra
  // row (below) per finite upper bound, then slack/surplus columns per row.
  int ncols = 0;
  struct BoundRow {
    int col;
    double rhs;
  };
  std::vector<BoundRow> bound_rows;
  for (std::size_t j = 0; j < lp.n_vars(); ++j) {
    double lo = lp.lower[j], hi = lp.upper[j];
    auto& vm = s.vars[j];
    if (lo > -inf) {
      vm.pos = ncols++;
      vm.shift = lo;
      if (hi < inf) bound_rows.push_back({vm.pos, hi - lo});
    } else if (hi < inf) {
      // x = hi - X, X >= 0.
      vm.neg = ncols++;
      vm.shift = hi;
    } else {
      vm.pos = ncols++;
      vm.neg = ncols++;
    }
  }

  const std::size_t m = lp.rows.size() + bound_rows.size();
  std::vector<Rel> rel(m);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, ncols);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const auto& row = lp.rows[i];
    rel[i] = row.rel;
    double rhs = row.rhs;
    for (auto [j, v] : row.coeffs) {
      const auto& vm = s.vars[j];
      if (vm.pos >= 0) A(i, vm.pos) += v;
      if (vm.neg >= 0) A(i, vm.neg) -= v;
      rhs -= v * vm.shift;
    }
    b(i) = rhs;
  }
  for (std::size_t k = 0; k < bound_rows.size(); ++k) {
    std::size_t i = lp.rows.size() + k;
    rel[i] = Rel::Le;
    A(i, bound_rows[k].col) = 1.0;
    b(i) = bound_rows[k].rhs;
  }

  // Slack/surplus columns for inequalities.
  int nslack = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (rel[i] != Rel::Eq) ++nslack;
  s.A = Eigen::MatrixXd::Zero(m, ncols + nslack);
  s.A.leftCols(ncols) = A;
  int sc = ncols;
  for (std::size_t i = 0; i < m; ++i) {
    if (rel[i] == Rel::Le) s.A(i, sc++) = 1.0;
    else if (rel[i] == Rel::Ge) s.A(i, sc++) = -1.0;
  }
  s.b = b;
  for (std::size_t i = 0; i < m; ++i)
    if (s.b(i) < 0) {
      s.b(i) = -s.b(i);
      s.A.row(i) = -s.A.row(i);
    }

  s.c = Eigen::VectorXd::Zero(ncols + nslack);
  for (std::size_t j = 0; j < lp.objective.size() && j < lp.n_vars(); ++j) {
    double v = lp.objective[j];
    if (v == 0.0) continue;
    const auto& vm = s.vars[j];
    if (vm.pos >= 0) s.c(vm.pos) += v;
    if (vm.neg >= 0) s.c(vm.neg) -= v;
    s.obj_offset += v * vm.shift;
  }
  return s;
}

namespace {

// Dense tableau state: A is B^{-1}[A | I_art], b is B^{-1}b, r the reduced
// costs, z the current objective. Row-major storage: every pivot is a sweep
// of row operations, which stride badly over column-major data.
using RowMajorMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Tableau {
  RowMajorMat A;
  Eigen::VectorXd b;
  Eigen::VectorXd r;
  double z = 0.0;
  std::vector<int> basis;

  void pivot(int row, int col) {
    double p = A(row, col);
    A.row(row) /= p;
    b(row) /= p;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      if (i == row) continue;
      double f = A(i, col);
      if (f != 0.0) {
        A.row(i) -= f * A.row(row);
        b(i) -= f * b(row);
        if (b(i) < 0 && b(i) > -1e-11) b(i) = 0;
      }
    }
    double f = r(col);
    if (f != 0.0) {
      r -= f * A.row(row).transpose();
      z += f * b(row);
    }
    basis[row] = col;
  }
};

enum class RunResult { Optimal, Unbounded, Paused };

// `limit_cols`: only columns < limit_cols may enter (used to lock artificials
// out in phase 2). Runs at most `burst` pivots, so the caller can refactorize
// before roundoff accumulates; returns Paused when the burst is used up.
RunResult run_simplex(Tableau& t, int limit_cols, const SolveOptions& opt,
                      int& iters_left, int burst, bool force_bland) {
  const bool dbg = std::getenv("BCERT_LP_DEBUG") != nullptr;
  bool bland = force_bland;
  int stall = 0;
  double best_z = t.z;
  while (true) {
    int enter = -1;
    if (bland) {
      for (int j = 0; j < limit_cols; ++j)
        if (t.r(j) < -opt.tol) {
          enter = j;
          break;
        }
    } else {
      double best = -opt.tol;
      for (int j = 0; j < limit_cols; ++j)
        if (t.r(j) < best) {
          best = t.r(j);
          enter = j;
        }
    }
    if (enter < 0) return RunResult::Optimal;

    int leave = -1;
    double best_ratio = 0.0;
    for (Eigen::Index i = 0; i < t.A.rows(); ++i) {
      double a = t.A(i, enter);
      if (a <= opt.pivot_tol) continue;
      // Drifted-negative basic values must not produce negative ratios (they
      // would drive the objective up); the refactorizing caller cleans them.
      double ratio = t.b(i) <= 0.0 ? 0.0 : t.b(i) / a;
      if (leave < 0 || ratio < best_ratio - 1e-12 ||
          (std::abs(ratio - best_ratio) <= 1e-12 && t.basis[i] < t.basis[leave])) {
        leave = static_cast<int>(i);
        best_ratio = ratio;
      }
    }
    if (leave < 0) return RunResult::Unbounded;

    if (--iters_left <= 0) throw IterationLimit("simplex pivot budget exhausted");
    t.pivot(leave, enter);
    if (--burst <= 0) return RunResult::Paused;

    // Dantzig is fast but can cycle on degenerate bases; fall back to Bland
    // after a stretch of pivots with no objective progress, and revert once
    // the plateau is escaped (pure Bland crawls on wide tableaus).
    if (t.z < best_z - 1e-12) {
      best_z = t.z;
      stall = 0;
      bland = false;
    } else if (!bland && ++stall > 200) {
      bland = true;
    }
    if (dbg && iters_left % 2000 == 0)
      std::fprintf(stderr, "[lp]   ... iters_left=%d z=%.6e bland=%d\n", iters_left,
                   t.z, bland ? 1 : 0);
  }
}

// Dual simplex restoration: the basis is dual feasible (r >= -tol) but some
// exact basic values went negative. Pivots them out while keeping the reduced
// costs nonnegative. Returns false when a negative row has no admissible
// pivot (the row is genuinely infeasible for this cost).
bool dual_restore(Tableau& t, int limit_cols, const SolveOptions& opt,
                  int& iters_left) {
  while (true) {
    int row = -1;
    double most = -opt.tol;
    for (Eigen::Index i = 0; i < t.A.rows(); ++i)
      if (t.b(i) < most) {
        most = t.b(i);
        row = static_cast<int>(i);
      }
    if (row < 0) return true;

    int enter = -1;
    double best_ratio = 0.0;
    for (int j = 0; j < limit_cols; ++j) {
      double a = t.A(row, j);
      if (a >= -opt.pivot_tol) continue;
      double ratio = std::max(t.r(j), 0.0) / -a;
      if (enter < 0 || ratio < best_ratio - 1e-12 ||
          (std::abs(ratio - best_ratio) <= 1e-12 && j < enter)) {
        enter = j;
        best_ratio = ratio;
      }
    }
    if (enter < 0) return false;
    if (--iters_left <= 0) throw IterationLimit("simplex pivot budget exhausted");
    t.pivot(row, enter);
  }
}

}  // namespace

LpSolution solve(const LinearProgram& lp, const SolveOptions& opt) {
  Standardized sf = standardize(lp);
  const int m = static_cast<int>(sf.A.rows());
  const int n = static_cast<int>(sf.A.cols());
  int iters_left = opt.max_iters;
  const bool dbg = std::getenv("BCERT_LP_DEBUG") != nullptr;
  if (dbg)
    std::fprintf(stderr, "[lp] rows=%zu vars=%zu std m=%d n=%d\n", lp.rows.size(),
                 lp.n_vars(), m, n);

  LpSolution sol;

  // Phase 1: minimize the sum of artificial variables.
  Tableau t;
  t.A.resize(m, n + m);
  t.A.leftCols(n) = sf.A;
  t.A.rightCols(m) = Eigen::MatrixXd::Identity(m, m);
  t.b = sf.b;
  t.basis.resize(m);
  for (int i = 0; i < m; ++i) t.basis[i] = n + i;
  // r = c - c_B^T B^{-1} A with c = (0 .. 0, 1 .. 1) and basis = artificials.
  t.r = Eigen::VectorXd::Zero(n + m);
  t.z = 0.0;
  for (int i = 0; i < m; ++i) {
    t.r.head(n) -= t.A.row(i).head(n).transpose();
    t.z += t.b(i);
  }

  // Rank-revealing refactorization: rebuild the tableau from the original
  // data and the current basis. Pivoting on a long path accumulates roundoff
  // in b; feasibility verdicts must come from exactly recomputed values.
  const RowMajorMat A0 = t.A;
  const Eigen::VectorXd b0 = sf.b;
  auto refresh = [&](const Eigen::VectorXd& cost) {
    Eigen::MatrixXd B(m, m);
    for (int i = 0; i < m; ++i) B.col(i) = A0.col(t.basis[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    t.A = lu.solve(A0);
    t.b = lu.solve(b0);
    // Iterative refinement: the basis can be ill-conditioned enough that one
    // LU solve leaves residuals far above the audit tolerance.
    for (int step = 0; step < 2; ++step) t.b += lu.solve(b0 - B * t.b);
    for (int i = 0; i < m; ++i)
      if (std::abs(t.b(i)) < 1e-12) t.b(i) = 0.0;
    t.r = cost;
    t.z = 0.0;
    for (int i = 0; i < m; ++i) {
      double cb = cost(t.basis[i]);
      if (cb != 0.0) {
        t.r -= cb * t.A.row(i).transpose();
        t.z += cb * t.b(i);
      }
    }
  };
  // Alternate short simplex bursts with exact refactorization: long pivot
  // paths accumulate roundoff that can silently corrupt the verdict. A round
  // that makes no exact objective progress switches the next burst to
  // Bland's rule so degenerate plateaus cannot cycle.
  auto run_refreshed = [&](const Eigen::VectorXd& cost, int limit_cols) {
    constexpr int kBurst = 500;
    double prev_z = std::numeric_limits<double>::infinity();
    bool force_bland = false;
    int safe_rounds = 0;   // >0: single-pivot bursts on exact data
    int bad_refreshes = 0;
    while (true) {
      const int iters_before = iters_left;
      const std::vector<int> saved_basis = t.basis;
      const int burst = safe_rounds > 0 ? 1 : kBurst;
      if (safe_rounds > 0) --safe_rounds;
      RunResult res = run_simplex(t, limit_cols, opt, iters_left, burst, force_bland);
      if (res == RunResult::Unbounded) return res;
      refresh(cost);
      if (!std::isfinite(t.z) || !t.b.allFinite()) {
        // A drifted pivot element was effectively zero: the new basis is
        // singular. Roll back to the last audited basis and replay one pivot
        // at a time, so every pivot choice is made on exact data.
        if (++bad_refreshes > 50)
          throw IterationLimit("simplex basis refactorization failed repeatedly");
        t.basis = saved_basis;
        refresh(cost);
        safe_rounds = 30;
        force_bland = !force_bland;  // vary the entering rule to avoid replaying
        continue;
      }
      if (std::getenv("BCERT_LP_DEBUG"))
        std::fprintf(stderr, "[lp]   burst done: z=%.6e pivots=%d paused=%d\n", t.z,
                     opt.max_iters - iters_left, res == RunResult::Paused ? 1 : 0);
      force_bland = t.z >= prev_z - 1e-12;
      prev_z = t.z;
      bool clean = true;
      for (int j = 0; j < limit_cols; ++j)
        if (t.r(j) < -opt.tol) clean = false;
      bool negative = false;
      for (int i = 0; i < m; ++i)
        if (t.b(i) < -1e-11) negative = true;
      if (negative) {
        // Exact recomputation exposed primal infeasibility that the drifted
        // tableau hid; restore it properly rather than clamping it away.
        clean = false;
        if (dual_restore(t, limit_cols, opt, iters_left)) refresh(cost);
      }
      for (int i = 0; i < m; ++i)
        if (t.b(i) < 0.0) t.b(i) = 0.0;  // residual negatives are below 1e-11
      if (res == RunResult::Optimal && clean) return res;
      // An optimal round that pivoted nowhere and still is not clean cannot
      // make further progress; hand the (audited) state back as is.
      if (res == RunResult::Optimal && iters_left == iters_before) return res;
    }
  };

  Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(n + m);
  phase1_cost.tail(m).setOnes();
  run_refreshed(phase1_cost, n + m);  // phase 1 is always bounded below by 0
  if (dbg)
    std::fprintf(stderr, "[lp] phase1 done, z=%.3e, pivots=%d\n", t.z,
                 opt.max_iters - iters_left);
  if (t.z > opt.tol) {
    sol.status = LpStatus::Infeasible;
    // Phase-1 dual y_i = 1 - r(artificial_i); -y is the Farkas vector:
    // (-y).A >= 0 componentwise (up to tol) with (-y).b = -z < 0.
    sol.farkas.resize(m);
    for (int i = 0; i < m; ++i) sol.farkas[i] = -(1.0 - t.r(n + i));
    return sol;
  }

  // Drive artificials out of the basis where possible; rows that cannot be
  // pivoted are redundant and the artificial stays parked at zero.
  for (int i = 0; i < m; ++i) {
    if (t.basis[i] < n) continue;
    int col = -1;
    for (int j = 0; j < n; ++j)
      if (std::abs(t.A(i, j)) > opt.pivot_tol) {
        col = j;
        break;
      }
    if (col >= 0) {
      if (--iters_left <= 0) throw IterationLimit("simplex pivot budget exhausted");
      t.pivot(i, col);
    }
  }

  // Phase 2 over the real objective.
  Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(n + m);
  phase2_cost.head(n) = sf.c;
  refresh(phase2_cost);
  for (int i = 0; i < m; ++i)
    if (t.b(i) < 0.0) t.b(i) = 0.0;
  RunResult r2 = run_refreshed(phase2_cost, n);
  if (r2 == RunResult::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  sol.status = LpStatus::Feasible;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i)
    if (t.basis[i] < n) x(t.basis[i]) = t.b(i);
  sol.assignment.resize(lp.n_vars());
  for (std::size_t j = 0; j < lp.n_vars(); ++j) {
    const auto& vm = sf.vars[j];
    double v = vm.shift;
    if (vm.pos >= 0) v += x(vm.pos);
    if (vm.neg >= 0) v -= x(vm.neg);
    sol.assignment[j] = v;
  }
  sol.objective_value = 0.0;
  for (std::size_t j = 0; j < lp.objective.size() && j < lp.n_vars(); ++j)
    sol.objective_value += lp.objective[j] * sol.assignment[j];
  return sol;
}

}  // namespace bcert
