#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "crossreg/chart.hpp"
#include "crossreg/kernels.hpp"
#include "crossreg/regularization.hpp"

namespace crossreg {

struct SmoothCheck {
  std::string name;
  double max_residual = 0.0;
  /// Richardson order of the second differences; empty when every sample was
  /// below the noise floor (second differences exact to rounding).
  std::optional<double> estimated_order;
  bool pass = true;
  std::size_t samples = 0;
  std::size_t exact_samples = 0;

  nlohmann::json to_json() const;
};

struct ChartReport {
  std::string chart_id;
  std::vector<SmoothCheck> checks;

  bool pass() const;
  nlohmann::json to_json() const;
};

struct SmoothnessReport {
  std::vector<ChartReport> charts;

  bool pass() const;
  nlohmann::json to_json() const;
};

struct SmoothOptions {
  int grid_points = 11;
  /// Nonnegative chart variables range over [0, r], the others over [-r, r].
  double radius = 0.9;
  std::vector<double> meshes = {1e-2, 5e-3, 2.5e-3};
  double continuity_tol = 1e-8;
  double min_order = 1.7;
  /// Second-difference changes below noise_floor * max(1, |value|) count as exact.
  double noise_floor = 1e-8;
  double truncation_tol = 1e-10;
  /// Points per variable of the off-divisor subgrid for the branch truncation check.
  int truncation_points = 5;
  /// Subgrid points per chart compared against tensor quadrature (0 skips the check).
  int quadrature_samples = 0;
  Exec exec = Exec::Parallel;
};

/// Runs continuity, finite-difference order, branch truncation, optional quadrature agreement
/// and fiber tangency checks for one atlas chart. A chart whose grid reaches
/// the undivided locus at eps = 0 gets a single failing defined_on_grid check.
ChartReport smoothness_report(const RegularizedField& rf, const PlanChart& chart, const SmoothOptions& opt = {});
SmoothnessReport smoothness_report(const RegularizedField& rf, const SmoothingPlan& plan, const SmoothOptions& opt = {});

/// As smoothness_report, raising NotSmooth (with the report as message) on failure.
ChartReport verify_smooth(const RegularizedField& rf, const PlanChart& chart, const SmoothOptions& opt = {});

/// Value at 0 of the interpolating polynomial through (h_k, v_k).
double neville_at_zero(std::span<const double> h, std::span<const double> v);

struct OverlapReport {
  std::size_t pairs = 0;
  double min_factor = 0.0;
  /// Largest |a - r b| / |a| for pushed-forward generators a, b and fitted ratio r.
  double max_parallel_residual = 0.0;
  /// Largest relative gap between the fitted ratio and the divisor quotient.
  double max_ratio_residual = 0.0;
  bool pass = false;

  nlohmann::json to_json() const;
};

/// Foliation transition check: on chart overlaps the divided generators differ
/// by a positive factor equal to the quotient of divisor monomials. Chart
/// points with some |w_j| > radius are skipped.
OverlapReport chart_overlap(const RegularizedField& rf, const SmoothingPlan& plan, std::size_t samples,
                            unsigned seed = 1, double radius = 3.0);

}  // namespace crossreg
