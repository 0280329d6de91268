#include "bcert/polynomial.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace bcert {

std::vector<Monomial> monomial_basis(std::size_t nvars, unsigned max_degree) {
  std::vector<Monomial> out;
  Monomial m(nvars);
  // Odometer over exponent vectors bounded by total degree.
  while (true) {
    out.push_back(m);
    std::size_t v = nvars;
    while (v > 0) {
      --v;
      ++m.exps[v];
      if (m.degree() <= max_degree) break;
      m.exps[v] = 0;
      if (v == 0) {
        std::sort(out.begin(), out.end(), [](const Monomial& a, const Monomial& b) {
          return GrlexLess{}(a, b);
        });
        return out;
      }
    }
    if (nvars == 0) {
      return out;  // only the empty monomial exists
    }
  }
}

std::vector<std::string> belief_vars(std::size_t n) {
  std::vector<std::string> v;
  v.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) v.push_back("b" + std::to_string(i));
  return v;
}

static std::string format_coeff(double c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", c);
  return buf;
}

std::string to_string(const Poly& p) {
  if (p.is_zero()) return "0";
  // Graded-lex descending reads naturally (leading term first).
  std::vector<std::pair<Monomial, double>> ts(p.terms().begin(), p.terms().end());
  std::reverse(ts.begin(), ts.end());
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : ts) {
    double mag = c < 0 ? -c : c;
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    bool printed = false;
    if (mag != 1.0 || m.degree() == 0) {
      os << format_coeff(mag);
      printed = true;
    }
    for (std::size_t v = 0; v < m.exps.size(); ++v) {
      if (m.exps[v] == 0) continue;
      if (printed) os << "*";
      os << p.vars()[v];
      if (m.exps[v] > 1) os << "^" << m.exps[v];
      printed = true;
    }
  }
  return os.str();
}

namespace {

// Recursive-descent parser: sum -> product -> power -> primary.
class Parser {
 public:
  Parser(const std::string& s, const std::vector<std::string>& vars)
      : s_(s), vars_(vars) {}

  Poly parse() {
    Poly p = sum();
    skip_ws();
    if (pos_ != s_.size())
      throw std::invalid_argument("polynomial parse error at '" + s_.substr(pos_) + "'");
    return p;
  }

 private:
  Poly sum() {
    Poly acc = product();
    while (true) {
      skip_ws();
      if (peek() == '+') {
        ++pos_;
        acc = acc + product();
      } else if (peek() == '-') {
        ++pos_;
        acc = acc - product();
      } else {
        return acc;
      }
    }
  }

  Poly product() {
    skip_ws();
    bool neg = false;
    while (peek() == '-' || peek() == '+') {
      if (peek() == '-') neg = !neg;
      ++pos_;
      skip_ws();
    }
    Poly acc = power();
    while (true) {
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        acc = acc * power();
      } else {
        break;
      }
    }
    return neg ? -acc : acc;
  }

  Poly power() {
    Poly base = primary();
    skip_ws();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) throw std::invalid_argument("expected integer exponent");
      return base.pow(static_cast<unsigned>(std::stoul(s_.substr(start, pos_ - start))));
    }
    return base;
  }

  Poly primary() {
    skip_ws();
    char c = peek();
    if (c == '(') {
      ++pos_;
      Poly p = sum();
      skip_ws();
      if (peek() != ')') throw std::invalid_argument("expected ')'");
      ++pos_;
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) throw std::invalid_argument("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return Poly::constant(vars_, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      return Poly::variable(vars_, s_.substr(start, pos_ - start));
    }
    throw std::invalid_argument(std::string("unexpected character '") + c + "'");
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(const std::string& text, const std::vector<std::string>& vars) {
  return Parser(text, vars).parse();
}

}  // namespace bcert
