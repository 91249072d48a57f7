#include "crossreg/multipoly.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "crossreg/error.hpp"

namespace crossreg {

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) throw Error(ErrorCode::ParseError, "empty rational");
  // Decimal literals are read exactly ("0.05" -> 1/20).
  if (auto dot = s.find('.'); dot != std::string::npos && s.find('/') == std::string::npos) {
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t frac = s.size() - dot - 1;
    Rational q;
    try {
      // base 10 explicitly: GMP would read a leading zero as octal
      q = Rational(mpz_class(digits.empty() || digits == "-" ? digits + "0" : digits, 10),
                   mpz_class("1" + std::string(frac, '0'), 10));
    } catch (const std::invalid_argument&) {
      throw Error(ErrorCode::ParseError, "bad decimal '" + text + "'");
    }
    q.canonicalize();
    return q;
  }
  Rational q;
  try {
    q = Rational(s, 10);
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::ParseError, "bad rational '" + text + "'");
  }
  if (q.get_den() == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + text + "'");
  q.canonicalize();
  return q;
}

std::string rational_to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

MultiPoly::MultiPoly(std::vector<std::string> vars) : vars_(std::move(vars)) {}

MultiPoly MultiPoly::constant(const std::vector<std::string>& vars, const Rational& c) {
  MultiPoly p(vars);
  p.add_term(Exponent(vars.size(), 0), c);
  return p;
}

MultiPoly MultiPoly::variable(const std::vector<std::string>& vars, const std::string& name) {
  MultiPoly p(vars);
  return variable(vars, p.index_of(name));
}

MultiPoly MultiPoly::variable(const std::vector<std::string>& vars, std::size_t index) {
  if (index >= vars.size()) throw Error(ErrorCode::InvalidArgument, "variable index out of range");
  Exponent e(vars.size(), 0);
  e[index] = 1;
  return monomial(vars, std::move(e), Rational(1));
}

MultiPoly MultiPoly::monomial(const std::vector<std::string>& vars, Exponent exps, const Rational& c) {
  if (exps.size() != vars.size()) throw Error(ErrorCode::InvalidArgument, "exponent length mismatch");
  for (int e : exps) {
    if (e < 0) throw Error(ErrorCode::InvalidArgument, "negative exponent");
  }
  MultiPoly p(vars);
  p.add_term(exps, c);
  return p;
}

std::size_t MultiPoly::index_of(const std::string& name) const {
  auto it = std::find(vars_.begin(), vars_.end(), name);
  if (it == vars_.end()) throw Error(ErrorCode::InvalidArgument, "unknown variable '" + name + "'");
  return static_cast<std::size_t>(it - vars_.begin());
}

bool MultiPoly::has_variable(const std::string& name) const {
  return std::find(vars_.begin(), vars_.end(), name) != vars_.end();
}

bool MultiPoly::is_constant() const {
  for (const auto& [e, c] : terms_) {
    for (int k : e) {
      if (k != 0) return false;
    }
  }
  return true;
}

Rational MultiPoly::coefficient(const Exponent& exps) const {
  auto it = terms_.find(exps);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational MultiPoly::constant_term() const { return coefficient(Exponent(vars_.size(), 0)); }

int MultiPoly::total_degree() const {
  int d = terms_.empty() ? -1 : 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int k : e) s += k;
    d = std::max(d, s);
  }
  return d;
}

int MultiPoly::degree_in(std::size_t var) const {
  int d = terms_.empty() ? -1 : 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
  return d;
}

std::vector<std::size_t> MultiPoly::support() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (degree_in(i) > 0) out.push_back(i);
  }
  return out;
}

void MultiPoly::add_term(const Exponent& e, const Rational& c) {
  if (c == 0) return;
  Rational v = c;
  v.canonicalize();
  auto [it, inserted] = terms_.emplace(e, v);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void MultiPoly::check_ring(const MultiPoly& other) const {
  if (vars_ != other.vars_) throw Error(ErrorCode::InvalidArgument, "polynomial ring mismatch");
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& other) {
  check_ring(other);
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& other) {
  check_ring(other);
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

MultiPoly& MultiPoly::operator*=(const MultiPoly& other) {
  check_ring(other);
  MultiPoly out(vars_);
  Exponent e(vars_.size());
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : other.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  terms_ = std::move(out.terms_);
  return *this;
}

MultiPoly& MultiPoly::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  Rational k = c;
  k.canonicalize();
  for (auto& [e, v] : terms_) v *= k;
  return *this;
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly p = *this;
  for (auto& [e, v] : p.terms_) v = -v;
  return p;
}

MultiPoly MultiPoly::pow(unsigned k) const {
  MultiPoly result = constant(vars_, Rational(1));
  MultiPoly base = *this;
  while (k > 0) {
    if (k & 1u) result *= base;
    k >>= 1u;
    if (k > 0) base *= base;
  }
  return result;
}

MultiPoly MultiPoly::derivative(std::size_t var) const {
  MultiPoly out(vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponent d = e;
    d[var] -= 1;
    out.add_term(d, c * e[var]);
  }
  return out;
}

MultiPoly MultiPoly::antiderivative(std::size_t var) const {
  MultiPoly out(vars_);
  for (const auto& [e, c] : terms_) {
    Exponent d = e;
    d[var] += 1;
    out.add_term(d, c / Rational(d[var]));
  }
  return out;
}

MultiPoly MultiPoly::integrate(std::size_t var, const MultiPoly& lo, const MultiPoly& hi) const {
  check_ring(lo);
  check_ring(hi);
  MultiPoly anti = antiderivative(var);
  return anti.substitute(var, hi) - anti.substitute(var, lo);
}

MultiPoly MultiPoly::substitute(const std::vector<MultiPoly>& images) const {
  if (images.size() != vars_.size()) throw Error(ErrorCode::InvalidArgument, "substitution arity mismatch");
  const auto& target = images.front().variables();
  for (const auto& im : images) {
    if (im.variables() != target) throw Error(ErrorCode::InvalidArgument, "substitution images in different rings");
  }
  // Cache powers of each image; degrees here are small.
  std::vector<std::vector<MultiPoly>> powers(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    int d = degree_in(i);
    powers[i].push_back(constant(target, Rational(1)));
    for (int k = 1; k <= d; ++k) powers[i].push_back(powers[i].back() * images[i]);
  }
  MultiPoly out(target);
  for (const auto& [e, c] : terms_) {
    MultiPoly term = constant(target, c);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] > 0) term *= powers[i][static_cast<std::size_t>(e[i])];
    }
    out += term;
  }
  return out;
}

MultiPoly MultiPoly::substitute(std::size_t var, const MultiPoly& image) const {
  check_ring(image);
  std::vector<MultiPoly> images;
  images.reserve(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    images.push_back(i == var ? image : variable(vars_, i));
  }
  return substitute(images);
}

MultiPoly MultiPoly::embed(const std::vector<std::string>& new_vars) const {
  std::vector<std::size_t> where(vars_.size());
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    auto it = std::find(new_vars.begin(), new_vars.end(), vars_[i]);
    if (it == new_vars.end()) {
      if (degree_in(i) > 0) throw Error(ErrorCode::InvalidArgument, "embed drops variable '" + vars_[i] + "'");
      where[i] = new_vars.size();
      continue;
    }
    where[i] = static_cast<std::size_t>(it - new_vars.begin());
  }
  MultiPoly out(new_vars);
  for (const auto& [e, c] : terms_) {
    Exponent ne(new_vars.size(), 0);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] > 0) ne[where[i]] = e[i];
    }
    out.add_term(ne, c);
  }
  return out;
}

MultiPoly MultiPoly::truncate(int max_degree, const std::vector<std::size_t>& degree_vars) const {
  MultiPoly out(vars_);
  for (const auto& [e, c] : terms_) {
    int d = 0;
    for (std::size_t v : degree_vars) d += e[v];
    if (d <= max_degree) out.add_term(e, c);
  }
  return out;
}

MultiPoly MultiPoly::homogeneous_part(int degree, const std::vector<std::size_t>& degree_vars) const {
  MultiPoly out(vars_);
  for (const auto& [e, c] : terms_) {
    int d = 0;
    for (std::size_t v : degree_vars) d += e[v];
    if (d == degree) out.add_term(e, c);
  }
  return out;
}

double MultiPoly::evaluate(std::span<const double> point) const {
  if (point.size() != vars_.size()) throw Error(ErrorCode::InvalidArgument, "evaluation point has wrong size");
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c.get_d();
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (int k = 0; k < e[i]; ++k) t *= point[i];
    }
    sum += t;
  }
  return sum;
}

Rational MultiPoly::evaluate(std::span<const Rational> point) const {
  if (point.size() != vars_.size()) throw Error(ErrorCode::InvalidArgument, "evaluation point has wrong size");
  Rational sum = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (int k = 0; k < e[i]; ++k) t *= point[i];
    }
    sum += t;
  }
  return sum;
}

std::string MultiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Highest total degree first reads closer to hand-written polynomials.
  std::vector<std::pair<Exponent, Rational>> ordered(terms_.begin(), terms_.end());
  std::stable_sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    int da = 0, db = 0;
    for (int k : a.first) da += k;
    for (int k : b.first) db += k;
    if (da != db) return da < db;
    return a.first > b.first;
  });
  for (const auto& [e, c] : ordered) {
    Rational mag = abs(c);
    bool neg = c < 0;
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    bool has_var = false;
    for (int k : e) has_var = has_var || k > 0;
    if (!has_var || mag != 1) {
      os << rational_to_string(mag);
      if (has_var) os << "*";
    }
    bool first_var = true;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!first_var) os << "*";
      os << vars_[i];
      if (e[i] > 1) os << "^" << e[i];
      first_var = false;
    }
    first = false;
  }
  return os.str();
}

namespace {

class PolyParser {
 public:
  PolyParser(const std::string& text, const std::vector<std::string>& vars) : s_(text), vars_(vars) {}

  MultiPoly parse() {
    MultiPoly p = expr();
    skip();
    if (pos_ != s_.size()) fail("trailing input");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::ParseError, why + " at position " + std::to_string(pos_) + " in '" + s_ + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  MultiPoly expr() {
    MultiPoly acc = term();
    for (;;) {
      if (eat('+')) acc += term();
      else if (eat('-')) acc -= term();
      else return acc;
    }
  }
  MultiPoly term() {
    MultiPoly acc = unary();
    for (;;) {
      if (eat('*')) {
        acc *= unary();
      } else if (eat('/')) {
        MultiPoly d = unary();
        if (!d.is_constant() || d.is_zero()) fail("division by non-constant");
        acc *= Rational(1) / d.constant_term();
      } else {
        return acc;
      }
    }
  }
  MultiPoly unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  MultiPoly power() {
    MultiPoly base = atom();
    if (eat('^')) {
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected integer exponent");
      base = base.pow(static_cast<unsigned>(std::stoul(s_.substr(start, pos_ - start))));
    }
    return base;
  }
  MultiPoly atom() {
    skip();
    if (eat('(')) {
      MultiPoly p = expr();
      if (!eat(')')) fail("expected ')'");
      return p;
    }
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      return MultiPoly::constant(vars_, parse_rational(s_.substr(start, pos_ - start)));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      if (std::find(vars_.begin(), vars_.end(), name) == vars_.end()) fail("unknown variable '" + name + "'");
      return MultiPoly::variable(vars_, name);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

MultiPoly parse_poly(const std::string& text, const std::vector<std::string>& vars) {
  return PolyParser(text, vars).parse();
}

CompiledPoly::CompiledPoly(const MultiPoly& p) : nvars_(p.nvars()) {
  for (const auto& [e, c] : p.terms()) {
    exps_.push_back(e);
    coefs_.push_back(c.get_d());
  }
}

double CompiledPoly::operator()(std::span<const double> point) const {
  double sum = 0.0;
  for (std::size_t t = 0; t < exps_.size(); ++t) {
    double v = coefs_[t];
    const Exponent& e = exps_[t];
    for (std::size_t i = 0; i < nvars_; ++i) {
      for (int k = 0; k < e[i]; ++k) v *= point[i];
    }
    sum += v;
  }
  return sum;
}

int CompiledPoly::max_degree(std::size_t var) const {
  int d = 0;
  for (const auto& e : exps_) d = std::max(d, e[var]);
  return d;
}

}  // namespace crossreg
