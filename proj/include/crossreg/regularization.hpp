#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "crossreg/chart.hpp"
#include "crossreg/mollifier.hpp"
#include "crossreg/multipoly.hpp"
#include "crossreg/piecewise.hpp"
#include "crossreg/quadrature.hpp"

namespace crossreg {

/// Closed interval of the mollifier variable; empty when hi <= lo.
struct Interval {
  double lo = -1.0;
  double hi = 1.0;
};

/// m_eps * f for a piecewise-polynomial f, completed by f itself at eps = 0.
///
/// Evaluation uses the moment route: each branch monomial of f(x - eps t)
/// factors per axis, so the integral over an orthant region reduces to
/// one-dimensional partial moments of the mollifier.
class RegularizedField {
 public:
  RegularizedField(PiecewiseField base, Mollifier mollifier);

  const PiecewiseField& base() const { return base_; }
  const Mollifier& mollifier() const { return m_; }
  int dimension() const { return base_.dimension(); }

  std::vector<double> evaluate(std::span<const double> x, double eps) const;
  /// Same as evaluate with the point given as (x, eps).
  std::vector<double> evaluate_point(std::span<const double> p) const;
  /// f^reg at a chart point, well defined on the exceptional divisor.
  std::vector<double> evaluate_in_chart(const ChartMap& chart, std::span<const double> w) const;
  /// Divisor-divided pullback of (f^reg, 0) through the chart (n + 1 components).
  std::vector<double> generator(const ChartMap& chart, std::span<const double> w) const;
  /// Allocation-free generator; out has n + 1 entries.
  void generator_into(const ChartMap& chart, std::span<const double> w, std::span<double> out) const;

  /// Highest supported degree of a branch polynomial in a single variable.
  static constexpr int kMaxDegree = 12;

 private:
  using Regions = std::array<std::array<Interval, 2>, kMaxComponents>;
  void assemble(std::span<const double> x, double eps, const Regions& regions, std::span<double> out) const;
  void chart_values(const ChartMap& chart, std::span<const double> w, std::span<double> out) const;

  PiecewiseField base_;
  Mollifier m_;
  std::vector<int> max_degree_;
  std::vector<double> full_moments_;
  struct FlatTerm {
    double coef;
    std::array<std::uint8_t, kMaxComponents> exps;
  };
  // Terms of branch b, component c: flat_[start_[b * n + c] .. start_[b * n + c + 1]).
  std::vector<FlatTerm> flat_;
  std::vector<std::size_t> start_;
  std::vector<int> active_;
  std::array<int, kMaxComponents> pos_{};
};

/// Quadrature route: tensor adaptive Gauss-Legendre of f(x - eps t) m(t).
std::vector<double> convolve_numeric(const CallableField& field, const Mollifier& m, std::span<const double> x,
                                     double eps, const QuadOptions& opt = {});
std::vector<double> convolve_numeric(const RegularizedField& rf, std::span<const double> x, double eps,
                                     const QuadOptions& opt = {});

/// Sotomayor-Teixeira interpolation 1/2(1+phi) X+ + 1/2(1-phi) X- across {x_axis = 0}.
std::vector<double> st_regularize(const VectorPoly& Xplus, const VectorPoly& Xminus, const Mollifier& m,
                                  std::span<const double> x, double eps, int axis = 1);

/// Integral of t^j / 2 from a to b, exact in the endpoint polynomials.
MultiPoly box_moment(int j, const MultiPoly& a, const MultiPoly& b);

/// Regularized field in a chart where it is a single polynomial.
struct CoreRegionPoly {
  std::string chart_id;
  std::vector<std::string> variables;
  /// f^reg composed with the chart, one polynomial per component of f.
  VectorPoly components;
  /// The core region is |v| <= 1 for every v in validity.
  std::vector<MultiPoly> validity;

  bool in_core(std::span<const double> w) const;
  nlohmann::json to_json() const;
};

/// Exact box-limit convolution pulled back to a chart in which every active
/// axis has x_i / eps equal to a chart monomial (family charts).
CoreRegionPoly convolve_symbolic(const PiecewiseField& field, const ChartMap& chart, const Mollifier& m);

/// Chart ring names: the field variables followed by eps.
std::vector<std::string> chart_variables(const PiecewiseField& field);

}  // namespace crossreg
