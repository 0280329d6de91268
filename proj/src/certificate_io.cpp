#include "bcert/certificate_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace bcert {

namespace {

using nlohmann::json;

json poly_json(const Poly& p) {
  return json{{"vars", p.vars()}, {"text", to_string(p)}};
}

Poly poly_from(const json& j) {
  std::vector<std::string> vars = j.at("vars").get<std::vector<std::string>>();
  return parse_poly(j.at("text").get<std::string>(), vars);
}

json monomial_json(const Monomial& m) { return json(m.exps); }

Monomial monomial_from(const json& j) {
  return Monomial(j.get<std::vector<unsigned>>());
}

json witness_json(const ConcreteWitness& w) {
  json blocks = json::array();
  for (const auto& b : w.blocks) {
    json basis = json::array();
    for (const auto& m : b.half_basis) basis.push_back(monomial_json(m));
    json gram = json::array();
    for (Eigen::Index i = 0; i < b.gram.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < b.gram.cols(); ++j) row.push_back(b.gram(i, j));
      gram.push_back(std::move(row));
    }
    blocks.push_back(json{{"half_basis", std::move(basis)},
                          {"gram", std::move(gram)},
                          {"generator", poly_json(b.generator)}});
  }
  json products = json::array();
  for (const auto& [c, prod] : w.products)
    products.push_back(json{{"coeff", c}, {"poly", poly_json(prod)}});
  return json{{"target", poly_json(w.target)},
              {"margin", w.margin},
              {"blocks", std::move(blocks)},
              {"products", std::move(products)}};
}

ConcreteWitness witness_from(const json& j) {
  ConcreteWitness w;
  w.target = poly_from(j.at("target"));
  w.margin = j.at("margin").get<double>();
  for (const auto& jb : j.at("blocks")) {
    ConcreteWitness::Block b;
    for (const auto& jm : jb.at("half_basis")) b.half_basis.push_back(monomial_from(jm));
    const auto& jg = jb.at("gram");
    b.gram.resize(jg.size(), jg.empty() ? 0 : jg[0].size());
    for (std::size_t i = 0; i < jg.size(); ++i)
      for (std::size_t k = 0; k < jg[i].size(); ++k) b.gram(i, k) = jg[i][k].get<double>();
    b.generator = poly_from(jb.at("generator"));
    w.blocks.push_back(std::move(b));
  }
  for (const auto& jp : j.at("products"))
    w.products.push_back({jp.at("coeff").get<double>(), poly_from(jp.at("poly"))});
  return w;
}

json evidence_json(const ValidationEvidence& ev) {
  return json{{"checked", ev.checked},
              {"identity_residual", ev.identity_residual},
              {"worst_margin", ev.worst_margin},
              {"n_samples", ev.n_samples},
              {"seed", std::to_string(ev.seed)}};
}

ValidationEvidence evidence_from(const json& j) {
  ValidationEvidence ev;
  ev.checked = j.at("checked").get<bool>();
  ev.identity_residual = j.at("identity_residual").get<double>();
  ev.worst_margin = j.at("worst_margin").get<double>();
  ev.n_samples = j.at("n_samples").get<int>();
  ev.seed = std::stoull(j.at("seed").get<std::string>());
  return ev;
}

json policy_json(const PolicyPartition& p) {
  json regions = json::array();
  for (const auto& r : p.regions)
    regions.push_back(json{{"guard", poly_json(r.guard)}, {"action", r.action}});
  return json{{"regions", std::move(regions)}, {"default_action", p.default_action}};
}

PolicyPartition policy_from(const json& j) {
  PolicyPartition p;
  for (const auto& jr : j.at("regions"))
    p.regions.push_back({poly_from(jr.at("guard")), jr.at("action").get<int>()});
  p.default_action = j.at("default_action").get<int>();
  return p;
}

const char* reach_mode_name(ReachMode m) {
  switch (m) {
    case ReachMode::Single: return "single";
    case ReachMode::PerAction: return "per_action";
    case ReachMode::PerPartition: return "per_partition";
  }
  return "single";
}

ReachMode reach_mode_from(const std::string& s) {
  if (s == "single") return ReachMode::Single;
  if (s == "per_action") return ReachMode::PerAction;
  if (s == "per_partition") return ReachMode::PerPartition;
  throw std::invalid_argument("unknown reach mode: " + s);
}

const char* barrier_mode_name(BarrierMode m) {
  switch (m) {
    case BarrierMode::Monolithic: return "monolithic";
    case BarrierMode::PerAction: return "per_action";
    case BarrierMode::PerPartition: return "per_partition";
  }
  return "monolithic";
}

BarrierMode barrier_mode_from(const std::string& s) {
  if (s == "monolithic") return BarrierMode::Monolithic;
  if (s == "per_action") return BarrierMode::PerAction;
  if (s == "per_partition") return BarrierMode::PerPartition;
  throw std::invalid_argument("unknown barrier mode: " + s);
}

json reach_json(const ReachCertificate& c) {
  json fns = json::array();
  for (const auto& fn : c.functions)
    fns.push_back(json{{"v", poly_json(fn.V)}, {"gamma", fn.gamma}, {"scope", fn.scope}});
  json witnesses = json::array();
  for (const auto& w : c.witnesses) witnesses.push_back(witness_json(w));
  json j{{"kind", "reach"},
         {"mode", reach_mode_name(c.mode)},
         {"degree", c.degree},
         {"epsilon", c.epsilon},
         {"functions", std::move(fns)},
         {"witnesses", std::move(witnesses)},
         {"validated", evidence_json(c.validated)}};
  if (c.policy) j["policy"] = policy_json(*c.policy);
  return j;
}

ReachCertificate reach_from(const json& j) {
  ReachCertificate c;
  c.mode = reach_mode_from(j.at("mode").get<std::string>());
  c.degree = j.at("degree").get<int>();
  c.epsilon = j.at("epsilon").get<double>();
  for (const auto& jf : j.at("functions"))
    c.functions.push_back({poly_from(jf.at("v")), jf.at("gamma").get<double>(),
                           jf.at("scope").get<int>()});
  for (const auto& jw : j.at("witnesses")) c.witnesses.push_back(witness_from(jw));
  c.validated = evidence_from(j.at("validated"));
  if (j.contains("policy")) c.policy = policy_from(j.at("policy"));
  return c;
}

json barrier_json(const BarrierCertificate& c) {
  json fns = json::array();
  for (const auto& B : c.functions) fns.push_back(poly_json(B));
  json witnesses = json::array();
  for (const auto& w : c.witnesses) witnesses.push_back(witness_json(w));
  json prop;
  if (const auto* s = std::get_if<SafetyProperty>(&c.property)) {
    prop = json{{"type", "safety"},
                {"unsafe_states", s->unsafe_states},
                {"lambda", s->lambda}};
  } else {
    const auto& o = std::get<OptimalityProperty>(c.property);
    json reward = json::array();
    for (Eigen::Index q = 0; q < o.reward.rows(); ++q) {
      json row = json::array();
      for (Eigen::Index a = 0; a < o.reward.cols(); ++a) row.push_back(o.reward(q, a));
      reward.push_back(std::move(row));
    }
    prop = json{{"type", "optimality"},
                {"reward", std::move(reward)},
                {"gamma", o.gamma},
                {"gamma_tilde", poly_json(o.gamma_tilde)}};
  }
  json j{{"kind", "barrier"},
         {"mode", barrier_mode_name(c.mode)},
         {"tau", c.tau},
         {"degree", c.degree},
         {"property", std::move(prop)},
         {"functions", std::move(fns)},
         {"witnesses", std::move(witnesses)},
         {"validated", evidence_json(c.validated)}};
  if (c.policy) j["policy"] = policy_json(*c.policy);
  return j;
}

BarrierCertificate barrier_from(const json& j) {
  BarrierCertificate c;
  c.mode = barrier_mode_from(j.at("mode").get<std::string>());
  c.tau = j.at("tau").get<int>();
  c.degree = j.at("degree").get<int>();
  const auto& jp = j.at("property");
  if (jp.at("type").get<std::string>() == "safety") {
    SafetyProperty s;
    s.unsafe_states = jp.at("unsafe_states").get<std::vector<int>>();
    s.lambda = jp.at("lambda").get<double>();
    c.property = s;
  } else {
    OptimalityProperty o;
    const auto& jr = jp.at("reward");
    o.reward.resize(jr.size(), jr.empty() ? 0 : jr[0].size());
    for (std::size_t q = 0; q < jr.size(); ++q)
      for (std::size_t a = 0; a < jr[q].size(); ++a) o.reward(q, a) = jr[q][a].get<double>();
    o.gamma = jp.at("gamma").get<double>();
    o.gamma_tilde = poly_from(jp.at("gamma_tilde"));
    c.property = o;
  }
  for (const auto& jf : j.at("functions")) c.functions.push_back(poly_from(jf));
  for (const auto& jw : j.at("witnesses")) c.witnesses.push_back(witness_from(jw));
  c.validated = evidence_from(j.at("validated"));
  if (j.contains("policy")) c.policy = policy_from(j.at("policy"));
  return c;
}

}  // namespace

std::string certificate_to_text(const Certificate& cert) {
  json j = std::holds_alternative<ReachCertificate>(cert)
               ? reach_json(std::get<ReachCertificate>(cert))
               : barrier_json(std::get<BarrierCertificate>(cert));
  return j.dump(2) + "\n";
}

Certificate certificate_from_text(const std::string& text) {
  json j = json::parse(text);
  if (j.at("kind").get<std::string>() == "reach") return reach_from(j);
  return barrier_from(j);
}

void save_certificate(const std::string& path, const Certificate& cert) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write certificate file: " + path);
  out << certificate_to_text(cert);
}

Certificate load_certificate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read certificate file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return certificate_from_text(ss.str());
}

}  // namespace bcert
