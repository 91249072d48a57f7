#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace crossreg {

/// Autonomous vector field x' = f(x); dx has the size of x.
using VecField = std::function<void(std::span<const double> x, std::span<double> dx)>;

struct DomainBox {
  std::vector<double> lo;
  std::vector<double> hi;
  bool contains(std::span<const double> x) const;
};

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2'000'000;
  std::optional<DomainBox> domain;
};

/// Hyperplane {l(x) = c} with an orientation filter on crossings (+1: l
/// increasing along the flow, -1: decreasing, 0: either) and an orthonormal
/// basis of ker l for local coordinates.
struct Section {
  std::vector<double> normal;
  double level = 0.0;
  int orientation = 0;
  std::vector<double> origin;
  std::vector<std::vector<double>> basis;

  /// In the plane the basis vector is the unit normal turned by -90 degrees,
  /// so {y = c} with normal (0, 1) is parametrized by x.
  static Section hyperplane(std::vector<double> normal, double level, int orientation = 0);
  /// Section {x_axis = level}, axis 1-based.
  static Section coordinate(std::size_t n, int axis, double level, int orientation = 0);

  std::size_t dim() const { return basis.size(); }
  double value(std::span<const double> x) const;
  /// l(f) / |l|.
  double normal_rate(std::span<const double> f) const;
  std::vector<double> point(std::span<const double> s) const;
  std::vector<double> coords(std::span<const double> x) const;
  nlohmann::json to_json() const;
};

struct EventRecord {
  std::size_t section = 0;
  double t = 0.0;
  std::vector<double> x;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> dx;
  std::vector<EventRecord> events;

  std::size_t size() const { return t.size(); }
  /// Cubic Hermite interpolation between stored samples.
  std::vector<double> interpolate(double s) const;
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

/// Adaptive Dormand-Prince 5(4) from t0 to t1 (t1 > t0). Crossings of the
/// given sections are located on the Hermite interpolant, then polished with a
/// single Runge-Kutta step from the last accepted point. Leaving a section the
/// start point lies on is not a crossing. With stop_at_event the integration
/// ends at the first accepted crossing.
/// Errors: StepFailure, Escape (left opt.domain).
Trajectory integrate(const VecField& f, std::span<const double> x0, double t0, double t1, const OdeOptions& opt = {},
                     const std::vector<Section>& sections = {}, bool stop_at_event = false);

}  // namespace crossreg
