#pragma once

#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

namespace crossreg {

/// Even product mollifier supported in [-1, 1] per axis.
///
/// box: constant 1/2 (the eta -> 0 limit used by the symbolic engine).
/// plateau(eta): constant on [-(1-eta), 1-eta], decaying to zero through a C-infinity
/// smooth step in the bands 1-eta < |t| < 1. The plateau height 1/(2-eta) gives
/// unit mass because the smooth step integrates to 1/2 over its band.
class Mollifier {
 public:
  static Mollifier box() { return Mollifier(0.0); }
  static Mollifier plateau(double eta);

  bool is_box() const { return eta_ == 0.0; }
  double eta() const { return eta_; }
  double height() const { return 1.0 / (2.0 - eta_); }

  double profile(double t) const;
  /// Integral of t^j m(t) over [lo, hi] intersected with [-1, 1].
  double moment(int j, double lo, double hi) const;
  /// out[j] = moment(j, lo, hi) for j = 0..K; out needs K + 1 entries.
  void moments(int K, double lo, double hi, std::span<double> out) const;
  /// Mass below y: M+(y).
  double mass_below(double y) const { return moment(0, -1.0, y); }
  /// Points where the profile is not analytic: -1, -(1-eta), 1-eta, 1.
  std::vector<double> breakpoints() const;

  nlohmann::json to_json() const;
  static Mollifier from_json(const nlohmann::json& j);

  friend bool operator==(const Mollifier& a, const Mollifier& b) { return a.eta_ == b.eta_; }

 private:
  struct BandTable;
  explicit Mollifier(double eta);
  /// Integral of t^j m(t) over [1-eta, y] for y in the upper band.
  double band_integral(int j, double y) const;
  /// out[j] += sign^j * scale * band_integral(j, y), j = 0..K.
  void add_band_integrals(int K, double y, double scale, double sign, std::span<double> out) const;

  double eta_ = 0.0;
  std::shared_ptr<const BandTable> band_;
};

/// C-infinity step on [0, 1]: 0 at 0, 1 at 1, s(v) + s(1 - v) = 1.
double smooth_step(double v);

struct Weights {
  double plus;
  double minus;
  double phi;
};

/// M+(y), M-(y) = 1 - M+(y) and the smoothed sign phi = M+ - M-.
Weights weight_functions(const Mollifier& m, double y);

}  // namespace crossreg
