#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "crossreg/ode.hpp"
#include "crossreg/piecewise.hpp"
#include "crossreg/regularization.hpp"

namespace crossreg {

using Matrix = std::vector<std::vector<double>>;

struct TransitionOptions {
  OdeOptions ode;
  double t_max = 100.0;
  /// Central differences use step fd_step * max(1, |s_i|).
  double fd_step = 1e-6;
  /// Crossings need |unit normal . f| >= transversality * |f|.
  double transversality = 1e-6;
  bool derivative = true;
};

struct TransitionResult {
  std::vector<double> coords;
  std::vector<double> point;
  double time = 0.0;
  Matrix derivative;
  Trajectory path;
};

/// Flow from the point with coordinates s on `from` to the first crossing of
/// `to` matching its orientation. Errors: Tangency, NoCrossing, plus ODE errors.
TransitionResult transition_map(const VecField& f, const Section& from, std::span<const double> s, const Section& to,
                                const TransitionOptions& opt = {});

struct PoincareResult {
  std::vector<double> fixed_point;
  std::vector<double> point;
  double return_time = 0.0;
  Matrix jacobian;
  std::vector<std::complex<double>> multipliers;
  double residual = 0.0;
  int iterations = 0;
  bool hyperbolic = false;

  nlohmann::json to_json() const;
};

using ReturnMap = std::function<std::vector<double>(std::span<const double>)>;

struct CycleOptions {
  double tol = 1e-10;
  int max_iterations = 50;
  double fd_step = 1e-6;
  /// Hyperbolic when every multiplier has |mu - 1| > margin.
  double margin = 1e-6;
};

/// Newton on P(s) - s with a central-difference Jacobian and step halving.
/// Errors: NoConvergence.
PoincareResult find_cycle(const ReturnMap& P, std::span<const double> seed, const CycleOptions& opt = {});

/// Central-difference Jacobian of a map between section coordinates.
Matrix fd_jacobian(const ReturnMap& P, std::span<const double> s, double step);

/// One leg of a sewing cycle: follow the given branch until the target section.
struct SewingStep {
  Section to;
  std::size_t branch = 0;
};

struct SewingSegment {
  std::size_t branch = 0;
  Section from;
  Section to;
  std::vector<double> entry;
  std::vector<double> exit;
  double time = 0.0;
  Trajectory path;
};

/// The sewing map starting on plan.back().to, returning coordinates on it.
/// At every crossing the arriving and the next branch must cross the section
/// the same way; otherwise SlidingDetected (Tangency if either is tangent).
std::vector<double> sewing_map(const PiecewiseField& field, const std::vector<SewingStep>& plan, std::span<const double> s,
                               const TransitionOptions& opt = {}, std::vector<SewingSegment>* segments = nullptr);

struct SewingCycle {
  PoincareResult result;
  std::vector<SewingSegment> segments;
};

SewingCycle sewing_poincare(const PiecewiseField& field, const std::vector<SewingStep>& plan, std::span<const double> seed,
                            const TransitionOptions& topt = {}, const CycleOptions& copt = {});

/// Field of m_eps * f for eps > 0 by the moment route.
VecField regularized_vector_field(const RegularizedField& rf, double eps);

/// First return of m_eps * f to the section (eps > 0).
std::vector<double> regularized_return(const RegularizedField& rf, double eps, const Section& section,
                                       std::span<const double> s, const TransitionOptions& opt = {});

/// Fixed point of the regularized return map; eps = 0 needs a sewing plan and
/// defers to sewing_poincare.
PoincareResult regularized_poincare(const RegularizedField& rf, double eps, const Section& section,
                                    std::span<const double> seed, const TransitionOptions& topt = {},
                                    const CycleOptions& copt = {}, const std::vector<SewingStep>& plan = {});

/// Planar product formula
/// prod |X_i(p_i)| sin(in_i) / (|X_i(p_i+1)| sin(out_i)) * exp(int div X_i),
/// sines signed by the section normals. Errors: DegenerateAngle.
double divergence_derivative(const PiecewiseField& field, const std::vector<SewingSegment>& segments,
                             const OdeOptions& opt = {}, double min_sine = 1e-8);

using Polyline = std::vector<std::vector<double>>;

/// Symmetric Hausdorff distance between two polylines, each resampled at
/// `samples` points equally spaced in arclength; distances are to segments.
double hausdorff(const Polyline& a, const Polyline& b, std::size_t samples = 2000);

}  // namespace crossreg
