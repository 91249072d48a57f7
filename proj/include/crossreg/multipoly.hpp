#pragma once

#include <gmpxx.h>

#include <map>
#include <span>
#include <string>
#include <vector>

namespace crossreg {

using Rational = mpq_class;
using Exponent = std::vector<int>;

Rational parse_rational(const std::string& text);
std::string rational_to_string(const Rational& q);

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in a std::map keyed by exponent vector, so iteration order is
/// canonical and zero coefficients are never stored. Binary operations require
/// both operands to share the same ordered variable list; use embed() to lift a
/// polynomial into a larger ring first.
class MultiPoly {
 public:
  MultiPoly() = default;
  explicit MultiPoly(std::vector<std::string> vars);

  static MultiPoly constant(const std::vector<std::string>& vars, const Rational& c);
  static MultiPoly variable(const std::vector<std::string>& vars, const std::string& name);
  static MultiPoly variable(const std::vector<std::string>& vars, std::size_t index);
  static MultiPoly monomial(const std::vector<std::string>& vars, Exponent exps, const Rational& c);

  const std::vector<std::string>& variables() const { return vars_; }
  std::size_t nvars() const { return vars_.size(); }
  const std::map<Exponent, Rational>& terms() const { return terms_; }
  std::size_t index_of(const std::string& name) const;
  bool has_variable(const std::string& name) const;

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational coefficient(const Exponent& exps) const;
  Rational constant_term() const;
  int total_degree() const;
  int degree_in(std::size_t var) const;
  /// Variables that actually occur with a nonzero exponent.
  std::vector<std::size_t> support() const;

  MultiPoly& operator+=(const MultiPoly& other);
  MultiPoly& operator-=(const MultiPoly& other);
  MultiPoly& operator*=(const MultiPoly& other);
  MultiPoly& operator*=(const Rational& c);
  MultiPoly operator-() const;
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(MultiPoly a, const MultiPoly& b) { return a *= b; }
  friend MultiPoly operator*(MultiPoly a, const Rational& c) { return a *= c; }
  friend MultiPoly operator*(const Rational& c, MultiPoly a) { return a *= c; }
  friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }

  MultiPoly pow(unsigned k) const;
  MultiPoly derivative(std::size_t var) const;
  MultiPoly derivative(const std::string& name) const { return derivative(index_of(name)); }
  /// Antiderivative in `var` with zero constant of integration.
  MultiPoly antiderivative(std::size_t var) const;
  /// Definite integral over var from lo to hi; the endpoints live in the same ring.
  MultiPoly integrate(std::size_t var, const MultiPoly& lo, const MultiPoly& hi) const;

  /// Simultaneous substitution var_i -> images[i]; all images share one target ring.
  MultiPoly substitute(const std::vector<MultiPoly>& images) const;
  MultiPoly substitute(std::size_t var, const MultiPoly& image) const;
  /// Re-express in a ring whose variables are a superset (matched by name).
  MultiPoly embed(const std::vector<std::string>& new_vars) const;
  /// Keep terms whose degree in the selected variables is at most max_degree.
  MultiPoly truncate(int max_degree, const std::vector<std::size_t>& degree_vars) const;
  /// Part of the polynomial homogeneous of the given degree in degree_vars.
  MultiPoly homogeneous_part(int degree, const std::vector<std::size_t>& degree_vars) const;

  double evaluate(std::span<const double> point) const;
  Rational evaluate(std::span<const Rational> point) const;

  std::string to_string() const;

 private:
  void add_term(const Exponent& e, const Rational& c);
  void check_ring(const MultiPoly& other) const;

  std::vector<std::string> vars_;
  std::map<Exponent, Rational> terms_;
};

/// Parse an expression like "1/2*(3 - x) + eps*y^2" in the given ring.
MultiPoly parse_poly(const std::string& text, const std::vector<std::string>& vars);

/// Double-precision copy of a polynomial for hot evaluation loops.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const MultiPoly& p);
  double operator()(std::span<const double> point) const;
  int max_degree(std::size_t var) const;
  std::size_t nvars() const { return nvars_; }
  const std::vector<Exponent>& exponents() const { return exps_; }
  const std::vector<double>& coefficients() const { return coefs_; }

 private:
  std::size_t nvars_ = 0;
  std::vector<Exponent> exps_;
  std::vector<double> coefs_;
};

}  // namespace crossreg
