#include "bcert/cassandra.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bcert {

namespace {

struct Tokenizer {
  std::vector<std::string> toks;
  std::size_t pos = 0;

  explicit Tokenizer(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      // ':' separates fields; make it its own token.
      std::string spaced;
      for (char c : line) {
        if (c == ':') {
          spaced += " : ";
        } else {
          spaced += c;
        }
      }
      std::istringstream ls(spaced);
      std::string t;
      while (ls >> t) toks.push_back(t);
    }
  }

  bool done() const { return pos >= toks.size(); }
  const std::string& peek() const { return toks[pos]; }
  std::string next() { return toks[pos++]; }
  bool accept(const std::string& s) {
    if (!done() && toks[pos] == s) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(const std::string& s) {
    if (!accept(s)) throw std::invalid_argument(".pomdp parse: expected '" + s + "'");
  }
  double number() {
    std::string t = next();
    std::size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(".pomdp parse: bad number " + t);
    return v;
  }
  bool peek_is_number() const {
    if (done()) return false;
    char c = toks[pos][0];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
  }
};

std::vector<std::string> parse_name_list(Tokenizer& tk, const std::string& prefix) {
  // Count shorthand only for bare unsigned integers; signed tokens like "-1"
  // or "+1" are legitimate names.
  bool all_digits =
      !tk.done() && !tk.peek().empty() &&
      std::all_of(tk.peek().begin(), tk.peek().end(),
                  [](unsigned char c) { return std::isdigit(c); });
  if (all_digits) {
    int n = static_cast<int>(tk.number());
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i));
    return names;
  }
  std::vector<std::string> names;
  static const std::vector<std::string> keywords = {
      "states", "actions", "observations", "start", "T", "O", "Tcol", "discount", "values"};
  while (!tk.done()) {
    // A following keyword + ':' ends the list.
    if (std::find(keywords.begin(), keywords.end(), tk.peek()) != keywords.end() &&
        tk.pos + 1 < tk.toks.size() && tk.toks[tk.pos + 1] == ":")
      break;
    names.push_back(tk.next());
  }
  if (names.empty()) throw std::invalid_argument(".pomdp parse: empty name list");
  return names;
}

int index_of(const std::vector<std::string>& names, const std::string& tok,
             const char* what) {
  auto it = std::find(names.begin(), names.end(), tok);
  if (it != names.end()) return static_cast<int>(it - names.begin());
  // Bare indices are accepted too.
  try {
    std::size_t used = 0;
    int v = std::stoi(tok, &used);
    if (used == tok.size() && v >= 0 && v < static_cast<int>(names.size())) return v;
  } catch (...) {
  }
  throw std::invalid_argument(std::string(".pomdp parse: unknown ") + what + " '" + tok + "'");
}

}  // namespace

Pomdp parse_pomdp(std::istream& in) {
  Tokenizer tk(in);
  Pomdp p;
  bool tcol = true;
  bool have_start = false;
  std::vector<bool> t_seen, o_seen;

  auto ensure_kernels = [&] {
    if (p.transition.empty()) {
      if (p.states.empty() || p.actions.empty() || p.observations.empty())
        throw std::invalid_argument(
            ".pomdp parse: T:/O: before states/actions/observations");
      p.transition.assign(p.n_actions(),
                          Eigen::MatrixXd::Zero(p.n_states(), p.n_states()));
      p.obs.assign(p.n_actions(),
                   Eigen::MatrixXd::Zero(p.n_states(), p.n_observations()));
      t_seen.assign(p.n_actions(), false);
      o_seen.assign(p.n_actions(), false);
    }
  };

  auto action_list = [&](const std::string& tok) {
    std::vector<int> out;
    if (tok == "*") {
      for (std::size_t a = 0; a < p.n_actions(); ++a) out.push_back(static_cast<int>(a));
    } else {
      out.push_back(index_of(p.actions, tok, "action"));
    }
    return out;
  };

  while (!tk.done()) {
    std::string key = tk.next();
    tk.expect(":");
    if (key == "discount" || key == "values") {
      tk.next();
    } else if (key == "Tcol") {
      std::string v = tk.next();
      tcol = (v == "true" || v == "1" || v == "yes");
    } else if (key == "states") {
      p.states = parse_name_list(tk, "s");
    } else if (key == "actions") {
      p.actions = parse_name_list(tk, "a");
    } else if (key == "observations") {
      p.observations = parse_name_list(tk, "z");
    } else if (key == "start") {
      p.initial_belief = Eigen::VectorXd::Zero(p.n_states());
      if (tk.peek() == "uniform") {
        tk.next();
        p.initial_belief.setConstant(1.0 / static_cast<double>(p.n_states()));
      } else if (!tk.peek_is_number()) {
        p.initial_belief(index_of(p.states, tk.next(), "state")) = 1.0;
      } else {
        for (std::size_t i = 0; i < p.n_states(); ++i) p.initial_belief(i) = tk.number();
      }
      have_start = true;
    } else if (key == "T") {
      ensure_kernels();
      auto acts = action_list(tk.next());
      if (tk.accept(":")) {
        int from = index_of(p.states, tk.next(), "state");
        if (tk.accept(":")) {
          // T: a : from : to prob
          int to = index_of(p.states, tk.next(), "state");
          double v = tk.number();
          for (int a : acts) p.transition[a](to, from) = v;
        } else {
          // T: a : from, then a distribution over next states.
          for (std::size_t to = 0; to < p.n_states(); ++to) {
            double v = tk.number();
            for (int a : acts) p.transition[a](to, from) = v;
          }
        }
      } else if (tk.accept("uniform")) {
        for (int a : acts)
          p.transition[a].setConstant(1.0 / static_cast<double>(p.n_states()));
      } else if (tk.accept("identity")) {
        for (int a : acts)
          p.transition[a] = Eigen::MatrixXd::Identity(p.n_states(), p.n_states());
      } else {
        // Full matrix block; Tcol decides orientation.
        Eigen::MatrixXd M(p.n_states(), p.n_states());
        for (std::size_t r = 0; r < p.n_states(); ++r)
          for (std::size_t c = 0; c < p.n_states(); ++c) M(r, c) = tk.number();
        if (!tcol) M.transposeInPlace();
        for (int a : acts) p.transition[a] = M;
      }
      for (int a : acts) t_seen[a] = true;
    } else if (key == "O") {
      ensure_kernels();
      auto acts = action_list(tk.next());
      if (tk.accept(":")) {
        int q = index_of(p.states, tk.next(), "state");
        if (tk.accept(":")) {
          int z = index_of(p.observations, tk.next(), "observation");
          double v = tk.number();
          for (int a : acts) p.obs[a](q, z) = v;
        } else {
          for (std::size_t z = 0; z < p.n_observations(); ++z) {
            double v = tk.number();
            for (int a : acts) p.obs[a](q, z) = v;
          }
        }
      } else if (tk.accept("uniform")) {
        for (int a : acts)
          p.obs[a].setConstant(1.0 / static_cast<double>(p.n_observations()));
      } else {
        Eigen::MatrixXd M(p.n_states(), p.n_observations());
        for (std::size_t q = 0; q < p.n_states(); ++q)
          for (std::size_t z = 0; z < p.n_observations(); ++z) M(q, z) = tk.number();
        for (int a : acts) p.obs[a] = M;
      }
      for (int a : acts) o_seen[a] = true;
    } else {
      throw std::invalid_argument(".pomdp parse: unknown stanza '" + key + "'");
    }
  }

  if (p.transition.empty()) throw std::invalid_argument(".pomdp parse: no T:/O: stanzas");
  if (!have_start) {
    p.initial_belief =
        Eigen::VectorXd::Constant(p.n_states(), 1.0 / static_cast<double>(p.n_states()));
  }
  p.validate();
  return p;
}

Pomdp parse_pomdp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open model file: " + path);
  return parse_pomdp(in);
}

std::string write_pomdp(const Pomdp& p) {
  std::ostringstream os;
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "# generated by bcert\n";
  os << "Tcol: true\n";
  os << "states:";
  for (const auto& s : p.states) os << " " << s;
  os << "\nactions:";
  for (const auto& a : p.actions) os << " " << a;
  os << "\nobservations:";
  for (const auto& z : p.observations) os << " " << z;
  os << "\nstart:";
  for (Eigen::Index i = 0; i < p.initial_belief.size(); ++i)
    os << " " << fmt(p.initial_belief(i));
  os << "\n";
  for (std::size_t a = 0; a < p.n_actions(); ++a) {
    os << "\nT: " << p.actions[a] << "\n";
    for (std::size_t i = 0; i < p.n_states(); ++i) {
      for (std::size_t j = 0; j < p.n_states(); ++j)
        os << (j ? " " : "") << fmt(p.transition[a](i, j));
      os << "\n";
    }
    os << "O: " << p.actions[a] << "\n";
    for (std::size_t q = 0; q < p.n_states(); ++q) {
      for (std::size_t z = 0; z < p.n_observations(); ++z)
        os << (z ? " " : "") << fmt(p.obs[a](q, z));
      os << "\n";
    }
  }
  return os.str();
}

PolicyPartition parse_policy(std::istream& in, const Pomdp& model) {
  PolicyPartition policy;
  bool have_default = false;
  auto vars = belief_vars(model.n_states());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    auto arrow = line.find("->");
    if (arrow == std::string::npos)
      throw std::invalid_argument("policy line " + std::to_string(lineno) + ": missing '->'");
    std::istringstream head(line.substr(0, arrow));
    std::string kind;
    head >> kind;
    std::string action_name;
    std::istringstream tail(line.substr(arrow + 2));
    tail >> action_name;
    int action = index_of(model.actions, action_name, "action");
    if (kind == "region") {
      std::string expr;
      std::getline(head, expr);
      policy.regions.push_back({parse_poly(expr, vars), action});
    } else if (kind == "default") {
      policy.default_action = action;
      have_default = true;
    } else {
      throw std::invalid_argument("policy line " + std::to_string(lineno) +
                                  ": expected 'region' or 'default'");
    }
  }
  if (!have_default) throw std::invalid_argument("policy file: missing 'default ->' line");
  return policy;
}

PolicyPartition parse_policy_file(const std::string& path, const Pomdp& model) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open policy file: " + path);
  return parse_policy(in, model);
}

}  // namespace bcert
