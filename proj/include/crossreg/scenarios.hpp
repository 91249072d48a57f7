#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crossreg/equilibrium.hpp"
#include "crossreg/poincare.hpp"
#include "crossreg/regularization.hpp"

namespace crossreg {

/// Named pass/fail entry with a human readable detail line.
struct Check {
  std::string name;
  bool pass = false;
  std::string detail;

  nlohmann::json to_json() const { return {{"name", name}, {"pass", pass}, {"detail", detail}}; }
};

/// One row of the two-sided normal forms across {x = 0}: X+ on x > 0, X- on
/// x < 0, and the expected divided field in the eps-chart at eta = 0.
struct TableRow {
  std::string name;
  std::array<std::string, 2> plus;
  std::array<std::string, 2> minus;
  std::array<std::string, 2> expected;
};

const std::vector<TableRow>& normal_form_table();

struct RowResult {
  std::string name;
  bool pass = false;
  /// Divided field in chart variables (x, y, eps); components 0 and 1.
  VectorPoly computed;
  VectorPoly expected;
  /// computed - expected.
  VectorPoly residual;

  nlohmann::json to_json() const;
};

RowResult run_row(const TableRow& row);

struct TableReport {
  std::vector<RowResult> rows;
  /// X+ = (1, 1), X- = (2, 1): ((3 - x)/2, eps).
  RowResult sewing;
  /// Largest |symbolic - quadrature| over the sewing core-region grid.
  double sewing_quadrature_error = 0.0;

  bool pass() const;
  nlohmann::json to_json() const;
};

TableReport run_table();

// ---------------------------------------------------------------------------
// lambda family

/// X+ = (1, -3(x+l)^2 + 2(x+l) + 7/4) on y > 0, X- = (-1, 3x^2 - 7x + 2) on y < 0.
PiecewiseField lambda_field(const Rational& lambda);
/// Crossing plan for the sewing cycle: upper branch down to {y = 0}, lower back up.
std::vector<SewingStep> lambda_sewing_plan();
/// Closed poly-trajectory through the two folds for lambda in (-5/6, 0):
/// upper arc, sliding segment, lower arc, sliding segment.
Polyline lambda_poly_trajectory(double lambda, std::size_t samples_per_arc = 4000);

struct LambdaOptions {
  std::vector<double> lambdas = {-0.4, 0.4, 0.7, 0.74, 0.78, 0.82, 0.9};
  std::vector<double> epsilons = {0.01};
  double eta = 0.0;
  /// Cycles are sought on {x = section_x}, crossed to the right, with
  /// y in [search_lo, search_hi]; search_lo = 0 means eps.
  double section_x = 1.0 / 3.0;
  double search_lo = 0.0;
  double search_hi = 2.0;
  std::vector<double> seeds = {0.1, 0.4, 0.8, 1.5};
  /// Hausdorff distance of each cycle to its eps = 0 limit when one is known.
  bool hausdorff = true;
  TransitionOptions transition;
  CycleOptions cycle;

  LambdaOptions();
};

struct CycleEntry {
  double lambda = 0.0;
  double eps = 0.0;
  bool found = false;
  double y = 0.0;
  double amplitude = 0.0;
  double multiplier = 0.0;
  double period = 0.0;
  std::optional<double> hausdorff;
  std::string note;
  Polyline orbit;

  nlohmann::json to_json() const;
};

struct BifurcationReport {
  std::vector<Check> structure;
  std::vector<CycleEntry> cycles;

  nlohmann::json to_json() const;
  /// lambda,eps,found,amplitude,multiplier,period,hausdorff
  std::string to_csv() const;
};

/// Structural data of X_lambda checked exactly: fold and region endpoints,
/// the symmetry at lambda = -5/6, and the eps-chart coefficient G.
std::vector<Check> lambda_structure(const Rational& lambda);

/// Cycle search on {x = section_x} for one (lambda, eps); eps = 0 uses the
/// sewing map instead and reports its own fixed point.
CycleEntry lambda_cycle(double lambda, double eps, const LambdaOptions& opt);

BifurcationReport run_lambda_family(const LambdaOptions& opt);

// ---------------------------------------------------------------------------
// planar cross

struct PlanarCrossOptions {
  Rational C{2};
  Rational B{1, 20};
  Rational D{1, 20};
  double drift_time = 10.0;
  double drift_rtol = 1e-10;
};

struct BTData {
  Rational C;
  Rational x;
  Rational B;
  Rational D;
  Rational D_printed;
  Rational a;
  Rational b;

  nlohmann::json to_json() const;
};

/// Cusp point x = y = (C - 1) / (2 (C + 1)) with B, D solving the equilibrium
/// equations exactly, and the 2-jet coefficients a, b of the nilpotent form
/// y d/dx + (a x^2 + b x y) d/dy. Errors: DegenerateParameters (C <= 0).
BTData bogdanov_takens(const Rational& C);

struct CrossReport {
  PlanarCrossOptions params;
  /// Constant values of the four quadrant fields, in branch order.
  std::array<std::array<Rational, 2>, 4> constants;
  std::vector<Check> checks;
  std::vector<EquilibriumInfo> equilibria;
  BTData cusp;
  std::optional<double> drift;

  bool pass() const;
  nlohmann::json to_json() const;
};

/// Errors: DegenerateParameters unless C, B, D > 0.
CrossReport run_planar_cross(const PlanarCrossOptions& opt);

// ---------------------------------------------------------------------------
// spatial cross

/// Eight constant vectors C^{a,b,c}_s in branch order (bit k set: s_k = -1),
/// in the ring {a, b, c}.
std::vector<VectorPoly> spatial_constants();

struct SpatialReport {
  Rational a, b, c;
  std::vector<Check> checks;
  /// 8 * core field in (x, y, z).
  VectorPoly core;
  /// 2-jet in (X, Y, Z) of the normalized core (weights P_s / 8).
  VectorPoly jet;

  bool pass() const;
  nlohmann::json to_json() const;
};

SpatialReport run_spatial_cross(const Rational& a, const Rational& b, const Rational& c);

/// Fields with |I| = 1, 2 (planar) and 3 (the spatial cross at zero unfolding)
/// discontinuity axes, used by the smoothing checks.
PiecewiseField smoothing_example(int axes);

// ---------------------------------------------------------------------------
// single-axis structure near the divisor

struct VerticalReport {
  std::size_t samples = 0;
  /// Largest |component k >= 2| of the divided field at eps = 0 (eps component included).
  double max_horizontal = 0.0;
  /// Largest |d/dy coefficient - (f1+(0, x) M+(y) + f1-(0, x) M-(y))|.
  double max_weight_residual = 0.0;
  double tol = 1e-10;

  bool pass() const { return max_horizontal <= tol && max_weight_residual <= tol; }
  nlohmann::json to_json() const;
};

/// Field across {x = 0} in three variables used by the single-axis checks.
PiecewiseField single_axis_example();

/// Divided field of the regularization on the family chart of {x_1 = 0} at
/// eps = 0, over y_points values of y in [-1.5, 1.5] and a grid of the
/// remaining coordinates in [-0.9, 0.9]. The locus must be {x_1 = 0}.
VerticalReport vertical_divisor_check(const PiecewiseField& field, const Mollifier& m, int y_points = 21,
                                      int x_points = 5);

struct STLinkReport {
  std::vector<double> eps;
  /// sup |convolution - ST| / eps for each eps.
  std::vector<double> K;
  double spread = 0.0;  // (max K - min K) / max K
  double max_spread = 0.2;

  bool pass() const { return !K.empty() && spread <= max_spread; }
  nlohmann::json to_json() const;
};

/// Sup over {|x_1| <= eps, |x_k| <= 1} on a grid of points per axis.
STLinkReport st_link(const PiecewiseField& field, const Mollifier& m, const std::vector<double>& eps,
                     int points = 41);

}  // namespace crossreg
