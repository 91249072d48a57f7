#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "crossreg/multipoly.hpp"
#include "crossreg/piecewise.hpp"

namespace crossreg {

using IntMatrix = std::vector<std::vector<int>>;

/// Monomial chart of N = R^n x R_{>=0}.
///
/// Coordinates are indexed 0..n; index n is eps on the target side and its
/// radial replacement on the chart side. Old coordinate k equals
/// signs[k] * prod_j w_j^E[k][j]. The divisor monomial w^divisor is the product
/// of all exceptional variables accumulated along a composition.
class ChartMap {
 public:
  ChartMap() = default;
  static ChartMap identity(int n);
  /// Directional chart with radial variable z_{i1}: x_{i1} = sign*z_{i1},
  /// x_i = z_{i1} z_i for i in R\{i1}, eps = z_{i1} rho.
  static ChartMap phase(int n, const std::vector<int>& R, int i1, int sign);
  /// Family chart: x_i = rho z_i for i in R, eps = rho.
  static ChartMap family(int n, const std::vector<int>& R);

  int n() const { return n_; }
  std::size_t dim() const { return static_cast<std::size_t>(n_) + 1; }
  const IntMatrix& exponents() const { return E_; }
  const IntMatrix& inverse_exponents() const { return Einv_; }
  const std::vector<int>& signs() const { return signs_; }
  const std::vector<bool>& nonneg() const { return nonneg_; }
  const std::vector<int>& divisor() const { return divisor_; }
  const std::string& id() const { return id_; }
  bool has_divisor() const;

  /// (x, eps) at chart point w.
  std::vector<double> map(std::span<const double> w) const;
  double old_coordinate(std::size_t k, std::span<const double> w) const;
  /// Chart point over (x, eps); exact for integer exponents whenever no coordinate is zero.
  std::vector<double> inverse_map(std::span<const double> p) const;
  double divisor_value(std::span<const double> w) const;
  /// d(old_k)/d(w_j).
  std::vector<std::vector<double>> jacobian(std::span<const double> w) const;
  std::vector<double> pushforward(std::span<const double> w, std::span<const double> v) const;

  /// Reduced pair (a, b) with x_axis / eps = a / b off the divisor, common
  /// monomial factors removed so both stay finite on it. axis is 1-based.
  std::pair<double, double> reduced_ratio(int axis, std::span<const double> w) const;
  /// The same pair as exact monomials in the chart ring.
  std::pair<MultiPoly, MultiPoly> reduced_ratio_poly(int axis, const std::vector<std::string>& vars) const;

  /// Pullback of a field F on N (n+1 values, eps component last) through the
  /// chart; OnDivisor when w lies on the exceptional divisor.
  std::vector<double> pullback(std::span<const double> w, std::span<const double> F) const;
  /// Pullback multiplied by the divisor monomial, written so that it stays
  /// finite on the divisor.
  std::vector<double> divided(std::span<const double> w, std::span<const double> F) const;
  /// Exact divided pullback of polynomial components given in the chart ring.
  std::vector<MultiPoly> divided_symbolic(const std::vector<MultiPoly>& F) const;
  /// Old coordinates as signed monomials in the chart ring.
  std::vector<MultiPoly> coordinate_polys(const std::vector<std::string>& vars) const;

  nlohmann::json to_json() const;

  /// Allocation-free variants for hot loops; out has dim() entries.
  void map_into(std::span<const double> w, std::span<double> out) const;
  void divided_into(std::span<const double> w, std::span<const double> F, std::span<double> out) const;
  /// map_into plus reduced_ratio for each listed axis: num[i] / den[i] = x_axes[i] / eps.
  void frame_into(std::span<const double> w, std::span<const int> axes, std::span<double> p, std::span<double> num,
                  std::span<double> den) const;

  friend ChartMap compose(const ChartMap& outer, const ChartMap& inner);
  friend bool operator==(const ChartMap& a, const ChartMap& b) {
    return a.E_ == b.E_ && a.signs_ == b.signs_ && a.divisor_ == b.divisor_ && a.nonneg_ == b.nonneg_;
  }

 private:
  void finalize();

  int n_ = 0;
  IntMatrix E_;
  IntMatrix Einv_;
  std::vector<int> signs_;
  std::vector<bool> nonneg_;
  std::vector<int> divisor_;
  std::string id_;

  struct Term {
    std::size_t j;
    std::size_t k;
    int coef;
    std::vector<int> exps;
  };
  std::vector<Term> divided_terms_;
  IntMatrix ratio_num_;
  IntMatrix ratio_den_;
  int top_ = 0;
};

/// outer after inner: the chart variables are those of inner.
ChartMap compose(const ChartMap& outer, const ChartMap& inner);

/// Composition of successive phase charts along the ordered axes; signs default to +.
ChartMap composed_chart(int n, const std::vector<int>& I, const std::vector<int>& chain,
                        const std::vector<int>& chain_signs = {});

/// Terminal chart of a smoothing plan together with its bookkeeping.
struct PlanChart {
  ChartMap chart;
  /// Phase steps (axis, sign) in the order they were applied.
  std::vector<std::pair<int, int>> dropped;
  /// Axes regularized by the final family chart (empty for pure phase chains).
  std::vector<int> family_axes;
  /// Discontinuity axes left after the chart; empty for every terminal chart.
  std::vector<int> residual;
};

struct SmoothingPlan {
  NormalCrossingsLocus locus;
  /// centers[k] lists the strata Sigma_J blown up at stage k, deepest first.
  std::vector<std::vector<std::vector<int>>> centers;
  std::vector<PlanChart> atlas;
};

SmoothingPlan smoothing_plan(const NormalCrossingsLocus& locus);

double monomial_value(std::span<const int> exps, std::span<const double> w);

}  // namespace crossreg
