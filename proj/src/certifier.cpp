#include "bcert/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bcert/errors.hpp"
#include "bcert/rng.hpp"

namespace bcert {

namespace {

double eval_mono(const Monomial& m, const std::vector<double>& pt) {
  double v = 1.0;
  for (std::size_t i = 0; i < m.exps.size(); ++i)
    for (unsigned k = 0; k < m.exps[i]; ++k) v *= pt[i];
  return v;
}

Poly mono_poly(const std::vector<std::string>& vars, const Monomial& m) {
  Poly p(vars);
  p.add_term(m, 1.0);
  return p;
}

double factorial(unsigned k) {
  double f = 1.0;
  for (unsigned i = 2; i <= k; ++i) f *= i;
  return f;
}

// Mean of the monomial y^e over the reduced simplex {y >= 0, sum y <= 1}:
// (prod e_i!) * m! / (|e| + m)! for m variables.
double simplex_mean(const Monomial& m) {
  double num = factorial(static_cast<unsigned>(m.exps.size()));
  unsigned total = 0;
  for (unsigned e : m.exps) {
    num *= factorial(e);
    total += e;
  }
  return num / factorial(total + static_cast<unsigned>(m.exps.size()));
}

std::string poly_drop_var_error(const std::string& v) {
  return "cannot eliminate variable " + v + ": it still appears";
}

// Drop trailing variables whose exponent is zero everywhere (after
// substitution has removed them).
Poly project_to(const Poly& p, const std::vector<std::string>& target) {
  Poly r(target);
  std::vector<int> where(p.vars().size(), -1);
  for (std::size_t v = 0; v < p.vars().size(); ++v) {
    auto it = std::find(target.begin(), target.end(), p.vars()[v]);
    if (it != target.end()) where[v] = static_cast<int>(it - target.begin());
  }
  for (const auto& [m, c] : p.terms()) {
    Monomial mm(target.size());
    for (std::size_t v = 0; v < p.vars().size(); ++v) {
      if (m.exps[v] == 0) continue;
      if (where[v] < 0) throw std::invalid_argument(poly_drop_var_error(p.vars()[v]));
      mm.exps[where[v]] = m.exps[v];
    }
    r.add_term(std::move(mm), c);
  }
  return r;
}

// One belief-update branch prepared for degree-d clearing.
struct Branch {
  int a = 0, z = 0;
  RationalMap f;
  Poly Nd;                           // denominator^d
  std::vector<Poly> cleared_basis;   // per V-basis monomial: prod M^e * N^(d-|e|)
};

std::vector<Branch> prepare_branches(const Pomdp& p, const std::vector<int>& actions,
                                     int degree, const std::vector<Monomial>& basis) {
  std::vector<Branch> out;
  for (int a : actions) {
    for (std::size_t z = 0; z < p.n_observations(); ++z) {
      if (p.obs[a].col(z).maxCoeff() <= 0.0) continue;  // impossible branch
      Branch br;
      br.a = a;
      br.z = static_cast<int>(z);
      br.f = belief_map(p, a, static_cast<int>(z));
      br.Nd = br.f.denominator.pow(degree);
      const auto& vars = br.f.denominator.vars();
      // Cached powers of each numerator and the denominator.
      std::vector<std::vector<Poly>> numpow(br.f.numerators.size());
      for (std::size_t v = 0; v < br.f.numerators.size(); ++v) {
        numpow[v].push_back(Poly::constant(vars, 1.0));
        for (int k = 1; k <= degree; ++k)
          numpow[v].push_back(numpow[v].back() * br.f.numerators[v]);
      }
      std::vector<Poly> denpow{Poly::constant(vars, 1.0)};
      for (int k = 1; k <= degree; ++k) denpow.push_back(denpow.back() * br.f.denominator);
      for (const auto& m : basis) {
        Poly term = Poly::constant(vars, 1.0);
        unsigned used = 0;
        for (std::size_t v = 0; v < m.exps.size(); ++v) {
          if (m.exps[v] == 0) continue;
          term = term * numpow[v][m.exps[v]];
          used += m.exps[v];
        }
        term = term * denpow[degree - used];
        br.cleared_basis.push_back(std::move(term));
      }
      out.push_back(std::move(br));
    }
  }
  return out;
}

PsatzOptions reach_psatz_options(int degree) {
  PsatzOptions o;
  o.s0_half_degree = degree;
  o.mult_half_degree = (2 * degree - 1) / 2;
  o.handelman = true;
  o.handelman_degree = 2 * degree;
  o.margin = 0.0;
  return o;
}

// The contraction target for one branch:
//   (1 - eps) * gamma * N^d  -  N^d (V o f)  +  eps * N^d V      (gamma = 1)
// Nonnegativity on the simplex makes {V <= 1} forward-invariant:
// V(f(y)) - 1 <= eps (V(y) - 1).
LinPoly contraction_target(const std::vector<std::string>& vars,
                           const std::vector<Monomial>& vbasis,
                           const std::vector<int>& vsyms_in,  // V being mapped
                           const std::vector<int>& vsyms_out, // V at the image
                           const Branch& br, double eps) {
  LinPoly target = LinPoly::fixed(br.Nd * (1.0 - eps));
  for (std::size_t k = 0; k < vbasis.size(); ++k) {
    target -= LinPoly::scaled(br.cleared_basis[k], vsyms_out[k]);
    target += LinPoly::scaled(br.Nd * mono_poly(vars, vbasis[k]) * eps, vsyms_in[k]);
  }
  return target;
}

LinExpr tightening_objective(const std::vector<Monomial>& basis,
                             const std::vector<int>& syms, std::size_t m,
                             double interior_weight) {
  // Maximize sum of V over the simplex vertices plus a weighted mean of V
  // over the whole simplex; larger V = tighter sublevel set. Minimization
  // form, hence the negation.
  LinExpr obj;
  std::vector<std::vector<double>> vertices;
  vertices.push_back(std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> v(m, 0.0);
    v[i] = 1.0;
    vertices.push_back(std::move(v));
  }
  for (std::size_t k = 0; k < basis.size(); ++k) {
    double c = 0.0;
    for (const auto& v : vertices) c += eval_mono(basis[k], v);
    c += interior_weight * simplex_mean(basis[k]);
    obj += LinExpr::sym(syms[k], -c);
  }
  return obj;
}

struct ReachProgramParts {
  ProgramBuilder builder;
  std::vector<Monomial> basis;
  std::vector<std::vector<int>> vsyms;  // per function (one, or one per region)
  std::vector<WitnessPlan> plans;
};

// Single / per-action program: one V constrained against every branch map.
ReachProgramParts build_reach_program(const Pomdp& p, const std::vector<double>& y0,
                                      int degree, const CertifierOptions& opt) {
  const std::size_t m = p.n_states() - 1;
  auto vars = belief_vars(m);
  ReachProgramParts parts;
  parts.basis = monomial_basis(m, degree);
  std::vector<int> syms;
  for (std::size_t k = 0; k < parts.basis.size(); ++k)
    syms.push_back(parts.builder.new_var("v" + std::to_string(k), -opt.coeff_bound,
                                         opt.coeff_bound));

  LinExpr at_b0;
  for (std::size_t k = 0; k < parts.basis.size(); ++k)
    at_b0 += LinExpr::sym(syms[k], eval_mono(parts.basis[k], y0));
  parts.builder.add_row(at_b0, Rel::Le, 1.0, "init");

  std::vector<int> all_actions(p.n_actions());
  for (std::size_t a = 0; a < p.n_actions(); ++a) all_actions[a] = static_cast<int>(a);
  auto branches = prepare_branches(p, all_actions, degree, parts.basis);
  auto gens = simplex_generators(vars);
  int idx = 0;
  for (const auto& br : branches) {
    LinPoly target = contraction_target(vars, parts.basis, syms, syms, br, opt.epsilon);
    parts.plans.push_back(encode_psatz(parts.builder, target, gens,
                                       reach_psatz_options(degree),
                                       "b" + std::to_string(idx++)));
  }
  parts.builder.set_objective(
      tightening_objective(parts.basis, syms, m, opt.interior_weight));
  parts.vsyms.push_back(std::move(syms));
  return parts;
}

// Region data for per-partition encodings: generator list (beyond the
// simplex) and the region's action.
struct RegionData {
  std::vector<Poly> extra_gens;  // over reduced coordinates
  int action = 0;
};

std::vector<RegionData> reduce_policy(const Pomdp& p, const PolicyPartition& policy) {
  const std::size_t n = p.n_states();
  std::vector<RegionData> out;
  std::vector<Poly> reduced_guards;
  for (const auto& r : policy.regions)
    reduced_guards.push_back(reduce_poly(r.guard, n));
  for (std::size_t i = 0; i < policy.regions.size(); ++i) {
    RegionData rd;
    rd.extra_gens = {-reduced_guards[i]};  // region is {guard <= 0}
    rd.action = policy.regions[i].action;
    out.push_back(std::move(rd));
  }
  RegionData def;
  def.extra_gens = reduced_guards;  // complement: every guard >= 0
  def.action = policy.default_action;
  out.push_back(std::move(def));
  return out;
}

ReachProgramParts build_policy_program(const Pomdp& p, const std::vector<double>& y0,
                                       const PolicyPartition& policy, int degree,
                                       const CertifierOptions& opt) {
  const std::size_t m = p.n_states() - 1;
  auto vars = belief_vars(m);
  ReachProgramParts parts;
  parts.basis = monomial_basis(m, degree);
  auto regions = reduce_policy(p, policy);
  const std::size_t R = regions.size();

  for (std::size_t i = 0; i < R; ++i) {
    std::vector<int> syms;
    for (std::size_t k = 0; k < parts.basis.size(); ++k)
      syms.push_back(parts.builder.new_var(
          "v" + std::to_string(i) + "_" + std::to_string(k), -opt.coeff_bound,
          opt.coeff_bound));
    LinExpr at_b0;
    for (std::size_t k = 0; k < parts.basis.size(); ++k)
      at_b0 += LinExpr::sym(syms[k], eval_mono(parts.basis[k], y0));
    parts.builder.add_row(at_b0, Rel::Le, 1.0, "init" + std::to_string(i));
    parts.vsyms.push_back(std::move(syms));
  }

  auto simplex = simplex_generators(vars);
  // For a belief in region i the policy plays a_i; the image may land in any
  // region j, so every V_j must contract relative to V_i there.
  for (std::size_t i = 0; i < R; ++i) {
    auto branches = prepare_branches(p, {regions[i].action}, degree, parts.basis);
    std::vector<Poly> gens = simplex;
    for (const auto& g : regions[i].extra_gens) gens.push_back(g);
    for (const auto& br : branches) {
      for (std::size_t j = 0; j < R; ++j) {
        LinPoly target = contraction_target(vars, parts.basis, parts.vsyms[i],
                                            parts.vsyms[j], br, opt.epsilon);
        parts.plans.push_back(
            encode_psatz(parts.builder, target, gens, reach_psatz_options(degree),
                         "r" + std::to_string(i) + "_" + std::to_string(j) + "_z" +
                             std::to_string(br.z)));
      }
    }
  }

  LinExpr obj;
  for (std::size_t i = 0; i < R; ++i)
    obj += tightening_objective(parts.basis, parts.vsyms[i], m, opt.interior_weight);
  parts.builder.set_objective(obj);
  return parts;
}

// The LP runs in floating point at tight margins; a solution only becomes a
// certificate if every cone identity survives the exact rational audit.
// Anything else is reported as inconclusive.
bool witnesses_sound(const std::vector<ConcreteWitness>& witnesses) {
  for (const auto& w : witnesses) {
    WitnessCheck c = check_witness(w);
    if (!c.ok) {
      if (std::getenv("BCERT_LP_DEBUG"))
        std::fprintf(stderr, "[audit] reject: %s\n", c.detail.c_str());
      return false;
    }
  }
  return true;
}

Poly instantiate_v(const std::vector<Monomial>& basis, const std::vector<int>& syms,
                   const std::vector<double>& assignment,
                   const std::vector<std::string>& vars) {
  Poly V(vars);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    double c = assignment.at(syms[k]);
    if (c != 0.0) V.add_term(basis[k], c);
  }
  return V;
}

}  // namespace

std::vector<double> reduce_belief(const Belief& b) {
  return std::vector<double>(b.data(), b.data() + b.size() - 1);
}

Poly reduce_poly(const Poly& full, std::size_t n_states) {
  auto full_vars = belief_vars(n_states);
  auto yvars = belief_vars(n_states - 1);
  Poly aligned = Poly(full_vars) + full;  // embed into the full variable list
  Poly repl = Poly::constant(full_vars, 1.0);
  for (std::size_t i = 0; i + 1 < n_states; ++i)
    repl = repl - Poly::variable(full_vars, full_vars[i]);
  Poly sub = aligned.substitute(full_vars.back(), repl);
  return project_to(sub, yvars);
}

double ReachCertificate::membership(const Belief& b) const {
  auto y = reduce_belief(b);
  if (mode == ReachMode::PerPartition && policy) {
    // First-match region selection mirrors policy_action.
    std::vector<double> pt(b.data(), b.data() + b.size());
    std::size_t region = policy->regions.size();  // default region index
    for (std::size_t i = 0; i < policy->regions.size(); ++i)
      if (policy->regions[i].guard.eval(pt) <= 0.0) {
        region = i;
        break;
      }
    for (const auto& fn : functions)
      if (fn.scope == static_cast<int>(region)) return fn.V.eval(y) - fn.gamma;
    return 0.0;  // unreachable if the certificate is well-formed
  }
  double worst = -LinearProgram::inf;
  for (const auto& fn : functions) worst = std::max(worst, fn.V.eval(y) - fn.gamma);
  return worst;
}

std::optional<ReachCertificate> reach_single(const Pomdp& p, const Belief& b0, int degree,
                                             const CertifierOptions& opt) {
  auto y0 = reduce_belief(b0);
  auto parts = build_reach_program(p, y0, degree, opt);
  LpSolution sol = solve(parts.builder.program(), opt.lp);
  if (sol.status != LpStatus::Feasible) return std::nullopt;
  ReachCertificate cert;
  cert.mode = ReachMode::Single;
  cert.degree = degree;
  cert.epsilon = opt.epsilon;
  cert.functions.push_back({instantiate_v(parts.basis, parts.vsyms[0], sol.assignment,
                                          belief_vars(p.n_states() - 1)),
                            1.0, -1});
  for (const auto& plan : parts.plans)
    cert.witnesses.push_back(concretize(plan, sol.assignment));
  if (!witnesses_sound(cert.witnesses)) return std::nullopt;
  return cert;
}

std::optional<ReachCertificate> reach_per_action(const Pomdp& p, const Belief& b0,
                                                 int degree, const CertifierOptions& opt) {
  auto y0 = reduce_belief(b0);
  ReachCertificate cert;
  cert.mode = ReachMode::PerAction;
  cert.degree = degree;
  cert.epsilon = opt.epsilon;
  // One local function per action; each must contract under every branch map
  // (all action pairs), so the programs share their constraint structure.
  for (std::size_t a = 0; a < p.n_actions(); ++a) {
    auto parts = build_reach_program(p, y0, degree, opt);
    LpSolution sol = solve(parts.builder.program(), opt.lp);
    if (sol.status != LpStatus::Feasible) return std::nullopt;
    cert.functions.push_back({instantiate_v(parts.basis, parts.vsyms[0], sol.assignment,
                                            belief_vars(p.n_states() - 1)),
                              1.0, static_cast<int>(a)});
    for (const auto& plan : parts.plans)
      cert.witnesses.push_back(concretize(plan, sol.assignment));
  }
  return cert;
}

std::optional<ReachCertificate> reach_policy(const Pomdp& p, const Belief& b0,
                                             const PolicyPartition& policy, int degree,
                                             const CertifierOptions& opt) {
  auto y0 = reduce_belief(b0);
  auto parts = build_policy_program(p, y0, policy, degree, opt);
  LpSolution sol = solve(parts.builder.program(), opt.lp);
  if (sol.status != LpStatus::Feasible) return std::nullopt;
  ReachCertificate cert;
  cert.mode = ReachMode::PerPartition;
  cert.degree = degree;
  cert.epsilon = opt.epsilon;
  cert.policy = policy;
  for (std::size_t i = 0; i < parts.vsyms.size(); ++i)
    cert.functions.push_back({instantiate_v(parts.basis, parts.vsyms[i], sol.assignment,
                                            belief_vars(p.n_states() - 1)),
                              1.0, static_cast<int>(i)});
  for (const auto& plan : parts.plans)
    cert.witnesses.push_back(concretize(plan, sol.assignment));
  if (!witnesses_sound(cert.witnesses)) return std::nullopt;
  return cert;
}

std::vector<LinearProgram> reach_programs(const Pomdp& p, const Belief& b0, int degree,
                                          ReachMode mode,
                                          const std::optional<PolicyPartition>& policy,
                                          const CertifierOptions& opt) {
  auto y0 = reduce_belief(b0);
  std::vector<LinearProgram> out;
  if (mode == ReachMode::PerPartition) {
    if (!policy) throw std::invalid_argument("per-partition mode needs a policy");
    out.push_back(build_policy_program(p, y0, *policy, degree, opt).builder.program());
  } else {
    std::size_t count = mode == ReachMode::Single ? 1 : p.n_actions();
    for (std::size_t i = 0; i < count; ++i)
      out.push_back(build_reach_program(p, y0, degree, opt).builder.program());
  }
  return out;
}

namespace {

// ---- barrier machinery ------------------------------------------------------

// B(t, y) is parametrized on the product basis {y^a * t^e : |a| <= d,
// e <= t_cap}; entries keep their (y-basis index, t exponent) factorization
// so branch clearing can reuse the per-monomial products.
struct BarrierBasis {
  std::vector<std::string> yvars;
  std::vector<std::string> btvars;  // yvars + "t"
  std::vector<Monomial> ybasis;
  struct Entry {
    std::size_t yindex;
    unsigned texp;
  };
  std::vector<Entry> entries;
  unsigned tmax = 0;
};

BarrierBasis barrier_basis(std::size_t m, int degree, int t_cap) {
  BarrierBasis bb;
  bb.yvars = belief_vars(m);
  bb.btvars = bb.yvars;
  bb.btvars.push_back("t");
  bb.ybasis = monomial_basis(m, degree);
  bb.tmax = static_cast<unsigned>(t_cap);
  for (std::size_t i = 0; i < bb.ybasis.size(); ++i)
    for (unsigned e = 0; e <= bb.tmax; ++e) bb.entries.push_back({i, e});
  return bb;
}

Poly instantiate_barrier(const BarrierBasis& bb, const std::vector<int>& syms,
                         const std::vector<double>& assignment) {
  const std::size_t m = bb.yvars.size();
  Poly B(bb.btvars);
  for (std::size_t k = 0; k < bb.entries.size(); ++k) {
    double c = assignment.at(syms[k]);
    if (c == 0.0) continue;
    Monomial mm(m + 1);
    const auto& ym = bb.ybasis[bb.entries[k].yindex];
    for (std::size_t v = 0; v < m; ++v) mm.exps[v] = ym.exps[v];
    mm.exps[m] = bb.entries[k].texp;
    B.add_term(std::move(mm), c);
  }
  return B;
}

// B with t fixed to a number, as a LinPoly over the y variables only.
LinPoly b_at_time(const BarrierBasis& bb, const std::vector<int>& syms, double tval) {
  LinPoly out(bb.yvars);
  for (std::size_t k = 0; k < bb.entries.size(); ++k) {
    double tw = 1.0;
    for (unsigned e = 0; e < bb.entries[k].texp; ++e) tw *= tval;
    out += LinPoly::scaled(mono_poly(bb.yvars, bb.ybasis[bb.entries[k].yindex]) * tw,
                           syms[k]);
  }
  return out;
}

LinExpr b_at_point(const BarrierBasis& bb, const std::vector<int>& syms,
                   const std::vector<double>& y, double tval) {
  LinExpr e;
  for (std::size_t k = 0; k < bb.entries.size(); ++k) {
    double tw = 1.0;
    for (unsigned i = 0; i < bb.entries[k].texp; ++i) tw *= tval;
    e += LinExpr::sym(syms[k], tw * eval_mono(bb.ybasis[bb.entries[k].yindex], y));
  }
  return e;
}

// Decrease target for one branch over (y, t):
//   N^d * B(t - 1, y)  -  N^d * B(t, f(y))  >= 0  on simplex x [1, tau].
// Branch::cleared_basis must be aligned with bb.ybasis.
LinPoly barrier_decrease_target(const BarrierBasis& bb, const std::vector<int>& syms_prev,
                                const std::vector<int>& syms_next, const Branch& br) {
  LinPoly target(bb.btvars);
  Poly t = Poly::variable(bb.btvars, "t");
  Poly tm1 = t - Poly::constant(bb.btvars, 1.0);
  std::vector<Poly> tm1_pow{Poly::constant(bb.btvars, 1.0)};
  std::vector<Poly> t_pow{Poly::constant(bb.btvars, 1.0)};
  for (unsigned e = 1; e <= bb.tmax; ++e) {
    tm1_pow.push_back(tm1_pow.back() * tm1);
    t_pow.push_back(t_pow.back() * t);
  }
  Poly Nd_bt = br.Nd.with_vars(bb.btvars);
  for (std::size_t k = 0; k < bb.entries.size(); ++k) {
    const auto& [yi, et] = bb.entries[k];
    Poly ypoly = mono_poly(bb.yvars, bb.ybasis[yi]).with_vars(bb.btvars);
    target += LinPoly::scaled(Nd_bt * ypoly * tm1_pow[et], syms_prev[k]);
    target -= LinPoly::scaled(br.cleared_basis[yi].with_vars(bb.btvars) * t_pow[et],
                              syms_next[k]);
  }
  return target;
}

PsatzOptions barrier_psatz_options(unsigned target_degree, double margin) {
  PsatzOptions o;
  o.s0_half_degree = static_cast<int>((target_degree + 1) / 2);
  o.mult_half_degree = -1;  // per-generator default
  o.handelman = true;
  o.handelman_degree = static_cast<int>(target_degree);
  o.margin = margin;
  return o;
}

// Probability the model assigns to the unsafe states, in reduced coordinates.
Poly unsafe_mass(const Pomdp& p, const std::vector<int>& unsafe_states) {
  auto full_vars = belief_vars(p.n_states());
  Poly mass(full_vars);
  for (int q : unsafe_states) mass = mass + Poly::variable(full_vars, full_vars[q]);
  return reduce_poly(mass, p.n_states());
}

Poly reward_poly(const Pomdp& p, const Eigen::MatrixXd& reward, int a) {
  auto full_vars = belief_vars(p.n_states());
  Poly r(full_vars);
  for (std::size_t q = 0; q < p.n_states(); ++q)
    r = r + Poly::variable(full_vars, full_vars[q]) * reward(q, a);
  return reduce_poly(r, p.n_states());
}

struct BarrierScope {
  std::vector<int> actions;      // branch maps this scope must not increase on
  std::vector<Poly> extra_gens;  // region restriction, over y
};

struct BarrierProgramParts {
  ProgramBuilder builder;
  BarrierBasis bb;
  std::vector<std::vector<int>> syms;  // per scope
  std::vector<WitnessPlan> plans;
};

}  // namespace

std::optional<BarrierCertificate> verify_safety(
    const Pomdp& p, const Belief& b0, const SafetyProperty& unsafe, int tau, int degree,
    BarrierMode mode, const std::optional<PolicyPartition>& policy,
    const CertifierOptions& opt) {
  if (unsafe.unsafe_states.empty())
    throw std::invalid_argument("safety property needs at least one unsafe state");
  if (tau < 1) throw std::invalid_argument("safety horizon must be >= 1");
  double b0_mass = 0.0;
  for (int q : unsafe.unsafe_states) b0_mass += b0(q);
  if (b0_mass > unsafe.lambda) {
    std::ostringstream os;
    os << "initial belief already places " << b0_mass
       << " on the unsafe states (lambda = " << unsafe.lambda << ")";
    throw OverlapError(os.str());
  }
  if (mode == BarrierMode::PerPartition && !policy)
    throw std::invalid_argument("per-partition safety verification needs a policy");

  const std::size_t m = p.n_states() - 1;
  auto y0 = reduce_belief(b0);
  const double mg = opt.strict_margin;
  Poly mass = unsafe_mass(p, unsafe.unsafe_states);

  // Scopes: one barrier for monolithic, one per action, or one per region.
  std::vector<BarrierScope> scopes;
  std::size_t init_scope = 0;
  if (mode == BarrierMode::PerPartition) {
    auto regions = reduce_policy(p, *policy);
    for (const auto& rd : regions) scopes.push_back({{rd.action}, rd.extra_gens});
    std::vector<double> pt(b0.data(), b0.data() + b0.size());
    init_scope = regions.size() - 1;
    for (std::size_t i = 0; i < policy->regions.size(); ++i)
      if (policy->regions[i].guard.eval(pt) <= 0.0) {
        init_scope = i;
        break;
      }
  } else {
    std::vector<int> all(p.n_actions());
    for (std::size_t a = 0; a < p.n_actions(); ++a) all[a] = static_cast<int>(a);
    std::size_t count = mode == BarrierMode::Monolithic ? 1 : p.n_actions();
    for (std::size_t i = 0; i < count; ++i) scopes.push_back({all, {}});
  }

  BarrierProgramParts parts;
  parts.bb = barrier_basis(m, degree, opt.t_degree);
  for (std::size_t s = 0; s < scopes.size(); ++s) {
    std::vector<int> syms;
    for (std::size_t k = 0; k < parts.bb.entries.size(); ++k)
      syms.push_back(parts.builder.new_var(
          "B" + std::to_string(s) + "_" + std::to_string(k), -opt.coeff_bound,
          opt.coeff_bound));
    parts.syms.push_back(std::move(syms));
  }

  auto simplex_y = simplex_generators(parts.bb.yvars);
  // Unsafe set shifted inward by the strictness margin; for lambda close to 1
  // the set is empty and the encoding degenerates to a Farkas combination.
  Poly unsafe_gen = mass - Poly::constant(parts.bb.yvars, unsafe.lambda + mg);

  for (std::size_t s = 0; s < scopes.size(); ++s) {
    // (a) positive on the unsafe set at the horizon.
    std::vector<Poly> gens_pos = simplex_y;
    for (const auto& g : scopes[s].extra_gens) gens_pos.push_back(g);
    gens_pos.push_back(unsafe_gen);
    LinPoly at_tau = b_at_time(parts.bb, parts.syms[s], static_cast<double>(tau));
    unsigned deg_pos = std::max(at_tau.degree(), 1u);
    parts.plans.push_back(encode_psatz(parts.builder, at_tau, gens_pos,
                                       barrier_psatz_options(deg_pos, mg),
                                       "pos" + std::to_string(s)));
  }

  // (b) negative at (0, b0) for the scope that owns the initial belief.
  if (mode == BarrierMode::PerPartition) {
    parts.builder.add_row(b_at_point(parts.bb, parts.syms[init_scope], y0, 0.0), Rel::Le,
                          -mg, "init");
  } else {
    for (std::size_t s = 0; s < scopes.size(); ++s)
      parts.builder.add_row(b_at_point(parts.bb, parts.syms[s], y0, 0.0), Rel::Le, -mg,
                            "init" + std::to_string(s));
  }

  // (c) non-increase along every branch of the scope, for t in [1, tau].
  Poly tvar = Poly::variable(parts.bb.btvars, "t");
  std::vector<Poly> gens_dec;
  for (const auto& g : simplex_y) gens_dec.push_back(g.with_vars(parts.bb.btvars));
  gens_dec.push_back(tvar - Poly::constant(parts.bb.btvars, 1.0));
  gens_dec.push_back(Poly::constant(parts.bb.btvars, static_cast<double>(tau)) - tvar);

  for (std::size_t s = 0; s < scopes.size(); ++s) {
    auto branches = prepare_branches(p, scopes[s].actions, degree, parts.bb.ybasis);
    std::vector<Poly> gens = gens_dec;
    for (const auto& g : scopes[s].extra_gens) gens.push_back(g.with_vars(parts.bb.btvars));
    for (const auto& br : branches) {
      // Per-partition: the image may land in any region, so pair every
      // successor barrier with this scope's map. Other modes pair each
      // barrier with itself.
      std::vector<std::size_t> successors;
      if (mode == BarrierMode::PerPartition) {
        for (std::size_t j = 0; j < scopes.size(); ++j) successors.push_back(j);
      } else {
        successors.push_back(s);
      }
      for (std::size_t j : successors) {
        LinPoly target =
            barrier_decrease_target(parts.bb, parts.syms[s], parts.syms[j], br);
        unsigned deg_t = std::max(target.degree(), 1u);
        parts.plans.push_back(encode_psatz(
            parts.builder, target, gens, barrier_psatz_options(deg_t, 0.0),
            "dec" + std::to_string(s) + "_" + std::to_string(j) + "_a" +
                std::to_string(br.a) + "z" + std::to_string(br.z)));
      }
    }
  }

  LpSolution sol = solve(parts.builder.program(), opt.lp);
  if (sol.status != LpStatus::Feasible) return std::nullopt;

  BarrierCertificate cert;
  cert.mode = mode;
  cert.tau = tau;
  cert.degree = degree;
  cert.property = unsafe;
  cert.policy = policy;
  for (std::size_t s = 0; s < scopes.size(); ++s)
    cert.functions.push_back(instantiate_barrier(parts.bb, parts.syms[s], sol.assignment));
  for (const auto& plan : parts.plans)
    cert.witnesses.push_back(concretize(plan, sol.assignment));
  if (!witnesses_sound(cert.witnesses)) return std::nullopt;
  return cert;
}

std::optional<BarrierCertificate> verify_optimality(
    const Pomdp& p, const Belief& b0, const Eigen::MatrixXd& reward, double gamma,
    std::optional<Poly> gamma_tilde, int tau, int degree, const CertifierOptions& opt) {
  if (tau < 1) throw std::invalid_argument("optimality horizon must be >= 1");
  const std::size_t m = p.n_states() - 1;
  std::vector<std::string> tvars = {"t"};
  Poly gt = gamma_tilde ? *gamma_tilde
                        : Poly::constant(tvars, gamma / static_cast<double>(tau + 1));
  // The tube must sum below the requested bound (checked exactly on the
  // integer time grid actually traversed).
  double tube_sum = 0.0;
  for (int s = 0; s <= tau; ++s) tube_sum += gt.eval({static_cast<double>(s)});
  if (tube_sum > gamma + 1e-9) {
    std::ostringstream os;
    os << "tube sums to " << tube_sum << " over horizon " << tau << " but gamma = "
       << gamma;
    throw TubeViolation(os.str());
  }

  const double mg = opt.strict_margin;
  auto y0 = reduce_belief(b0);

  BarrierProgramParts parts;
  parts.bb = barrier_basis(m, degree, opt.t_degree);
  std::vector<int> syms;
  for (std::size_t k = 0; k < parts.bb.entries.size(); ++k)
    syms.push_back(parts.builder.new_var("B" + std::to_string(k), -opt.coeff_bound,
                                         opt.coeff_bound));
  parts.syms.push_back(syms);

  auto simplex_y = simplex_generators(parts.bb.yvars);
  Poly tvar = Poly::variable(parts.bb.btvars, "t");
  Poly gt_bt = gt.with_vars(parts.bb.btvars);

  // (a) positive wherever the stage reward pokes above the tube, at any time
  // in [0, tau], for every action.
  for (std::size_t a = 0; a < p.n_actions(); ++a) {
    std::vector<Poly> gens;
    for (const auto& g : simplex_y) gens.push_back(g.with_vars(parts.bb.btvars));
    gens.push_back(tvar);
    gens.push_back(Poly::constant(parts.bb.btvars, static_cast<double>(tau)) - tvar);
    Poly r_a = reward_poly(p, reward, static_cast<int>(a)).with_vars(parts.bb.btvars);
    Poly excess = r_a - gt_bt - Poly::constant(parts.bb.btvars, mg);
    if (excess.degree() == 0) {
      // Constant reward vs constant tube. A negative constant makes the
      // constraint set empty (the condition holds vacuously); a nonnegative
      // one makes the generator redundant. Either way, keeping it as a
      // generator only destabilizes the LP.
      if (excess.eval(std::vector<double>(parts.bb.btvars.size(), 0.0)) < 0.0)
        continue;
    } else {
      gens.push_back(excess);
    }
    LinPoly target(parts.bb.btvars);
    for (std::size_t k = 0; k < parts.bb.entries.size(); ++k) {
      const auto& [yi, et] = parts.bb.entries[k];
      Poly mono = mono_poly(parts.bb.yvars, parts.bb.ybasis[yi]).with_vars(parts.bb.btvars);
      for (unsigned e = 0; e < et; ++e) mono = mono * tvar;
      target += LinPoly::scaled(mono, syms[k]);
    }
    unsigned deg_t = std::max(target.degree(), 1u);
    parts.plans.push_back(encode_psatz(parts.builder, target, gens,
                                       barrier_psatz_options(deg_t, mg),
                                       "pos_a" + std::to_string(a)));
  }

  // (b) negative at (0, b0).
  parts.builder.add_row(b_at_point(parts.bb, syms, y0, 0.0), Rel::Le, -mg, "init");

  // (c) non-increase along every branch for t in [1, tau].
  std::vector<int> all(p.n_actions());
  for (std::size_t a = 0; a < p.n_actions(); ++a) all[a] = static_cast<int>(a);
  auto branches = prepare_branches(p, all, degree, parts.bb.ybasis);
  std::vector<Poly> gens_dec;
  for (const auto& g : simplex_y) gens_dec.push_back(g.with_vars(parts.bb.btvars));
  gens_dec.push_back(tvar - Poly::constant(parts.bb.btvars, 1.0));
  gens_dec.push_back(Poly::constant(parts.bb.btvars, static_cast<double>(tau)) - tvar);
  for (const auto& br : branches) {
    LinPoly target = barrier_decrease_target(parts.bb, syms, syms, br);
    unsigned deg_t = std::max(target.degree(), 1u);
    parts.plans.push_back(encode_psatz(parts.builder, target, gens_dec,
                                       barrier_psatz_options(deg_t, 0.0),
                                       "dec_a" + std::to_string(br.a) + "z" +
                                           std::to_string(br.z)));
  }

  LpSolution sol = solve(parts.builder.program(), opt.lp);
  if (sol.status != LpStatus::Feasible) return std::nullopt;

  BarrierCertificate cert;
  cert.mode = BarrierMode::Monolithic;
  cert.tau = tau;
  cert.degree = degree;
  OptimalityProperty prop;
  prop.reward = reward;
  prop.gamma = gamma;
  prop.gamma_tilde = gt;
  cert.property = prop;
  cert.functions.push_back(instantiate_barrier(parts.bb, syms, sol.assignment));
  for (const auto& plan : parts.plans)
    cert.witnesses.push_back(concretize(plan, sol.assignment));
  if (!witnesses_sound(cert.witnesses)) return std::nullopt;
  return cert;
}

namespace {

void fail_validation(const std::string& what) { throw ValidationFailure(what); }

void audit_witnesses(const std::vector<ConcreteWitness>& witnesses,
                     ValidationEvidence& ev) {
  for (const auto& w : witnesses) {
    WitnessCheck chk = check_witness(w);
    ev.identity_residual = std::max(ev.identity_residual, chk.identity_residual);
    if (!chk.ok) fail_validation("witness audit failed: " + chk.detail);
  }
}

std::string point_string(const Belief& b) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < b.size(); ++i) os << (i ? ", " : "") << b(i);
  os << ")";
  return os.str();
}

}  // namespace

ValidationEvidence validate_certificate(const ReachCertificate& cert, const Pomdp& p,
                                        int n_samples, std::uint64_t seed) {
  ValidationEvidence ev;
  ev.checked = true;
  ev.n_samples = n_samples;
  ev.seed = seed;
  audit_witnesses(cert.witnesses, ev);

  // Sampled soundness: every reachable belief visited by simulation must sit
  // inside the certified set.
  const int horizon = 20;
  int n_traj = std::max(1, n_samples / (horizon + 1));
  std::optional<PolicyPartition> policy;
  if (cert.mode == ReachMode::PerPartition) policy = cert.policy;
  auto cloud = reach_sample(p, p.initial_belief, horizon, n_traj, seed, policy);
  for (const auto& b : cloud) {
    double v = cert.membership(b);
    ev.worst_margin = std::min(ev.worst_margin, -v);
    if (v > 1e-8)
      fail_validation("sampled reachable belief " + point_string(b) +
                      " escapes the certified set by " + std::to_string(v));
  }
  return ev;
}

ValidationEvidence validate_certificate(const BarrierCertificate& cert, const Pomdp& p,
                                        int n_samples, std::uint64_t seed) {
  ValidationEvidence ev;
  ev.checked = true;
  ev.n_samples = n_samples;
  ev.seed = seed;
  audit_witnesses(cert.witnesses, ev);

  const std::size_t m = p.n_states() - 1;
  Rng rng(seed);
  auto eval_B = [&](const Poly& B, const Belief& b, double t) {
    std::vector<double> pt = reduce_belief(b);
    pt.resize(m + 1);
    pt[m] = t;
    return B.eval(pt);  // B is over (y1..y_m, t)
  };

  const auto* safety = std::get_if<SafetyProperty>(&cert.property);
  const auto* optim = std::get_if<OptimalityProperty>(&cert.property);

  // Pointwise positivity checks on Dirichlet samples of the unsafe set.
  int kept = 0;
  for (int k = 0; k < n_samples; ++k) {
    auto full = rng.dirichlet(static_cast<int>(p.n_states()));
    Belief b = Eigen::Map<Eigen::VectorXd>(full.data(), full.size());
    if (safety) {
      double mass = 0.0;
      for (int q : safety->unsafe_states) mass += b(q);
      if (mass < safety->lambda + 1e-6) continue;
      ++kept;
      // Per-partition scopes restrict to their region; skip mismatches.
      for (std::size_t s = 0; s < cert.functions.size(); ++s) {
        if (cert.mode == BarrierMode::PerPartition && cert.policy) {
          std::vector<double> pt(b.data(), b.data() + b.size());
          std::size_t region = cert.policy->regions.size();
          for (std::size_t i = 0; i < cert.policy->regions.size(); ++i)
            if (cert.policy->regions[i].guard.eval(pt) <= 0.0) {
              region = i;
              break;
            }
          if (region != s) continue;
        }
        double v = eval_B(cert.functions[s], b, static_cast<double>(cert.tau));
        ev.worst_margin = std::min(ev.worst_margin, v);
        if (v < 1e-6 - 1e-8)
          fail_validation("barrier not positive on unsafe belief " + point_string(b));
      }
    } else if (optim) {
      double t = rng.next_double() * cert.tau;
      for (std::size_t a = 0; a < p.n_actions(); ++a) {
        double r = 0.0;
        for (std::size_t q = 0; q < p.n_states(); ++q) r += b(q) * optim->reward(q, a);
        double tube = optim->gamma_tilde.eval({t});
        if (r < tube + 1e-6) continue;
        ++kept;
        double v = eval_B(cert.functions[0], b, t);
        ev.worst_margin = std::min(ev.worst_margin, v);
        if (v < 1e-6 - 1e-8)
          fail_validation("barrier not positive above the reward tube at " +
                          point_string(b));
      }
    }
  }
  (void)kept;

  // Trajectory checks: negative start, monotone chain, certified bound.
  int n_traj = std::max(1, n_samples / (cert.tau + 1));
  for (int k = 0; k < n_traj; ++k) {
    std::uint64_t s = splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (k + 1)));
    ActionSource src = UniformActions{};
    if (cert.mode == BarrierMode::PerPartition && cert.policy) src = *cert.policy;
    Trajectory t = simulate(p, src, cert.tau, s);
    auto scope_of = [&](const Belief& b) -> std::size_t {
      if (cert.mode == BarrierMode::PerPartition && cert.policy) {
        std::vector<double> pt(b.data(), b.data() + b.size());
        for (std::size_t i = 0; i < cert.policy->regions.size(); ++i)
          if (cert.policy->regions[i].guard.eval(pt) <= 0.0) return i;
        return cert.policy->regions.size();
      }
      return 0;
    };
    if (cert.mode == BarrierMode::PerAction) {
      for (const auto& B : cert.functions)
        if (eval_B(B, t.beliefs[0], 0.0) > -1e-6 + 1e-8)
          fail_validation("barrier not negative at the initial belief");
    } else {
      const Poly& B0 = cert.functions[scope_of(t.beliefs[0])];
      if (eval_B(B0, t.beliefs[0], 0.0) > -1e-6 + 1e-8)
        fail_validation("barrier not negative at the initial belief");
    }
    for (int step = 1; step <= cert.tau; ++step) {
      double prev, cur;
      if (cert.mode == BarrierMode::PerAction) {
        // every local barrier forms its own chain
        for (const auto& B : cert.functions) {
          prev = eval_B(B, t.beliefs[step - 1], step - 1.0);
          cur = eval_B(B, t.beliefs[step], static_cast<double>(step));
          ev.worst_margin = std::min(ev.worst_margin, prev - cur);
          if (cur > prev + 1e-8) fail_validation("barrier chain increases along a trajectory");
        }
      } else {
        prev = eval_B(cert.functions[scope_of(t.beliefs[step - 1])], t.beliefs[step - 1],
                      step - 1.0);
        cur = eval_B(cert.functions[scope_of(t.beliefs[step])], t.beliefs[step],
                     static_cast<double>(step));
        ev.worst_margin = std::min(ev.worst_margin, prev - cur);
        if (cur > prev + 1e-8) fail_validation("barrier chain increases along a trajectory");
      }
    }
    if (safety) {
      double mass = 0.0;
      for (int q : safety->unsafe_states) mass += t.beliefs[cert.tau](q);
      if (mass > safety->lambda + 1e-8)
        fail_validation("certified safety bound violated at the horizon: mass " +
                        std::to_string(mass));
    } else if (optim) {
      double total = 0.0;
      for (int step = 0; step < cert.tau; ++step) {
        int a = t.actions[step];
        for (std::size_t q = 0; q < p.n_states(); ++q)
          total += t.beliefs[step](q) * optim->reward(q, a);
      }
      // final stage uses the last action again only if one exists
      if (!t.actions.empty()) {
        int a = t.actions.back();
        for (std::size_t q = 0; q < p.n_states(); ++q)
          total += t.beliefs[cert.tau](q) * optim->reward(q, a);
      }
      if (total > optim->gamma + 1e-8)
        fail_validation("certified cumulative reward bound violated: " +
                        std::to_string(total));
    }
  }
  return ev;
}

}  // namespace bcert
