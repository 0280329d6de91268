#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "bcert/lp.hpp"

namespace bcert {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Pad to the classic fixed column width where the value fits; longer values
// (full-precision doubles) simply take more room, and the reader tokenizes
// on whitespace anyway.
std::string field(const std::string& s, std::size_t width) {
  if (s.size() >= width) return s + " ";
  return s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string to_mps(const LinearProgram& lp) {
  std::ostringstream os;
  os << "NAME          BCERT\n";
  os << "ROWS\n";
  os << " N  COST\n";
  for (const auto& row : lp.rows) {
    char r = row.rel == Rel::Le ? 'L' : row.rel == Rel::Ge ? 'G' : 'E';
    os << " " << r << "  " << row.name << "\n";
  }

  // Column-major entries: per variable, objective first, then rows in order.
  os << "COLUMNS\n";
  std::vector<std::vector<std::pair<std::string, double>>> col_entries(lp.n_vars());
  for (std::size_t j = 0; j < lp.objective.size() && j < lp.n_vars(); ++j)
    if (lp.objective[j] != 0.0) col_entries[j].push_back({"COST", lp.objective[j]});
  for (const auto& row : lp.rows)
    for (auto [j, v] : row.coeffs)
      if (v != 0.0) col_entries[j].push_back({row.name, v});
  for (std::size_t j = 0; j < lp.n_vars(); ++j) {
    for (const auto& [rname, v] : col_entries[j]) {
      os << "    " << field(lp.var_names[j], 10) << field(rname, 10) << num(v) << "\n";
    }
    if (col_entries[j].empty()) {
      // A variable with no matrix entries still needs a COLUMNS mention so
      // the reader learns it exists.
      os << "    " << field(lp.var_names[j], 10) << field("COST", 10) << "0\n";
    }
  }

  os << "RHS\n";
  for (const auto& row : lp.rows)
    if (row.rhs != 0.0)
      os << "    " << field("RHS", 10) << field(row.name, 10) << num(row.rhs) << "\n";

  os << "BOUNDS\n";
  constexpr double inf = LinearProgram::inf;
  for (std::size_t j = 0; j < lp.n_vars(); ++j) {
    double lo = lp.lower[j], hi = lp.upper[j];
    if (lo == 0.0 && hi == inf) continue;  // the MPS default
    if (lo == -inf && hi == inf) {
      os << " FR " << field("BND", 9) << lp.var_names[j] << "\n";
      continue;
    }
    if (lo == -inf) os << " MI " << field("BND", 9) << lp.var_names[j] << "\n";
    else if (lo != 0.0)
      os << " LO " << field("BND", 9) << field(lp.var_names[j], 10) << num(lo) << "\n";
    if (hi < inf)
      os << " UP " << field("BND", 9) << field(lp.var_names[j], 10) << num(hi) << "\n";
  }
  os << "ENDATA\n";
  return os.str();
}

void export_mps(const LinearProgram& lp, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << to_mps(lp);
  if (!out) throw std::runtime_error("write failed: " + path);
}

LinearProgram parse_mps(std::istream& in) {
  LinearProgram lp;
  std::map<std::string, int> row_index;  // name -> lp.rows index
  std::map<std::string, int> var_index;
  std::string obj_name;

  auto var_of = [&](const std::string& name) {
    auto it = var_index.find(name);
    if (it != var_index.end()) return it->second;
    int j = lp.add_var(name, 0.0, LinearProgram::inf);  // MPS default bound
    var_index.emplace(name, j);
    return j;
  };

  enum Section { None, Rows, Columns, Rhs, Bounds, Ranges } section = None;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '*') continue;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    std::string t;
    while (ls >> t) tok.push_back(t);
    if (tok.empty()) continue;

    if (line[0] != ' ' && line[0] != '\t') {
      const std::string& kw = tok[0];
      if (kw == "NAME") section = None;
      else if (kw == "ROWS") section = Rows;
      else if (kw == "COLUMNS") section = Columns;
      else if (kw == "RHS") section = Rhs;
      else if (kw == "RANGES") section = Ranges;
      else if (kw == "BOUNDS") section = Bounds;
      else if (kw == "ENDATA") break;
      else throw std::invalid_argument("MPS: unknown section " + kw);
      continue;
    }

    switch (section) {
      case Rows: {
        if (tok.size() < 2) throw std::invalid_argument("MPS: bad ROWS line");
        char r = tok[0][0];
        if (r == 'N') {
          if (obj_name.empty()) obj_name = tok[1];
        } else {
          Rel rel = r == 'L' ? Rel::Le : r == 'G' ? Rel::Ge : Rel::Eq;
          row_index.emplace(tok[1], static_cast<int>(lp.rows.size()));
          lp.add_row({}, rel, 0.0, tok[1]);
        }
        break;
      }
      case Columns: {
        if (tok.size() < 3 || tok.size() % 2 == 0)
          throw std::invalid_argument("MPS: bad COLUMNS line");
        if (tok[1] == "'MARKER'") break;  // integer markers ignored
        int j = var_of(tok[0]);
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          double v = std::stod(tok[k + 1]);
          if (tok[k] == obj_name) {
            if (v != 0.0) lp.set_objective_coeff(j, v);
          } else {
            auto it = row_index.find(tok[k]);
            if (it == row_index.end())
              throw std::invalid_argument("MPS: unknown row " + tok[k]);
            lp.rows[it->second].coeffs.push_back({j, v});
          }
        }
        break;
      }
      case Rhs: {
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          auto it = row_index.find(tok[k]);
          if (it == row_index.end())
            throw std::invalid_argument("MPS: unknown RHS row " + tok[k]);
          lp.rows[it->second].rhs = std::stod(tok[k + 1]);
        }
        break;
      }
      case Bounds: {
        if (tok.size() < 3) throw std::invalid_argument("MPS: bad BOUNDS line");
        const std::string& kind = tok[0];
        int j = var_of(tok[2]);
        double v = tok.size() > 3 ? std::stod(tok[3]) : 0.0;
        if (kind == "FR") {
          lp.lower[j] = -LinearProgram::inf;
          lp.upper[j] = LinearProgram::inf;
        } else if (kind == "MI") {
          lp.lower[j] = -LinearProgram::inf;
        } else if (kind == "PL") {
          lp.upper[j] = LinearProgram::inf;
        } else if (kind == "LO") {
          lp.lower[j] = v;
        } else if (kind == "UP") {
          lp.upper[j] = v;
        } else if (kind == "FX") {
          lp.lower[j] = lp.upper[j] = v;
        } else {
          throw std::invalid_argument("MPS: unsupported bound kind " + kind);
        }
        break;
      }
      case Ranges:
        throw std::invalid_argument("MPS: RANGES not supported");
      case None:
        break;
    }
  }
  return lp;
}

LinearProgram import_mps(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open MPS file: " + path);
  return parse_mps(in);
}

}  // namespace bcert
