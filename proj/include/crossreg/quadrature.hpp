#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "crossreg/error.hpp"

namespace crossreg {

/// Largest number of integrand components handled by the vector routines.
inline constexpr std::size_t kMaxComponents = 8;

struct QVec {
  std::array<double, kMaxComponents> v{};
  std::size_t n = 0;

  explicit QVec(std::size_t size = 0) : n(size) {}
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
  QVec& operator+=(const QVec& o) {
    for (std::size_t i = 0; i < n; ++i) v[i] += o.v[i];
    return *this;
  }
  double max_abs_diff(const QVec& o) const {
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(v[i] - o.v[i]));
    return d;
  }
};

struct QuadOptions {
  double abs_tol = 1e-10;
  int max_depth = 40;
  // Absolute noise per unit length in the integrand values (for integrands that
  // are themselves computed by quadrature); added to the acceptance test.
  double noise = 0.0;
};

/// Ten-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre10 {
  std::array<double, 10> nodes;
  std::array<double, 10> weights;
  static const GaussLegendre10& get();
};

namespace detail {

template <class F>
QVec gl10(const F& f, double a, double b, std::size_t ncomp) {
  const auto& rule = GaussLegendre10::get();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  QVec acc(ncomp);
  for (std::size_t k = 0; k < 10; ++k) {
    QVec fx = f(mid + half * rule.nodes[k]);
    for (std::size_t i = 0; i < ncomp; ++i) acc[i] += rule.weights[k] * fx[i];
  }
  for (std::size_t i = 0; i < ncomp; ++i) acc[i] *= half;
  return acc;
}

template <class F>
QVec adapt(const F& f, double a, double b, const QVec& whole, double tol, int depth, const QuadOptions& opt) {
  const double mid = 0.5 * (a + b);
  QVec left = gl10(f, a, mid, whole.n);
  QVec right = gl10(f, mid, b, whole.n);
  QVec halves = left;
  halves += right;
  if (halves.max_abs_diff(whole) <= tol + opt.noise * (b - a)) return halves;
  if (depth >= opt.max_depth) {
    throw Error(ErrorCode::QuadratureFailure, "tolerance not reached on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  QVec out = adapt(f, a, mid, left, 0.5 * tol, depth + 1, opt);
  out += adapt(f, mid, b, right, 0.5 * tol, depth + 1, opt);
  return out;
}

}  // namespace detail

/// Adaptive Gauss-Legendre: accept GL10 on the two halves when it agrees with
/// GL10 on the whole interval to within tol, otherwise bisect with tol/2.
/// F maps double -> QVec with ncomp components.
template <class F>
QVec integrate_adaptive(const F& f, double a, double b, std::size_t ncomp, const QuadOptions& opt = {}) {
  if (b <= a) return QVec(ncomp);
  QVec whole = detail::gl10(f, a, b, ncomp);
  return detail::adapt(f, a, b, whole, opt.abs_tol, 0, opt);
}

/// Integral over [a, b] split at the interior entries of cuts; the tolerance is
/// shared across pieces in proportion to their length.
template <class F>
QVec integrate_pieces(const F& f, double a, double b, std::vector<double> cuts, std::size_t ncomp,
                      const QuadOptions& opt = {}) {
  QVec total(ncomp);
  if (b <= a) return total;
  std::vector<double> pts{a};
  std::sort(cuts.begin(), cuts.end());
  for (double c : cuts) {
    if (c > pts.back() && c < b) pts.push_back(c);
  }
  pts.push_back(b);
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    QuadOptions local = opt;
    local.abs_tol = opt.abs_tol * (pts[k + 1] - pts[k]) / (b - a);
    total += integrate_adaptive(f, pts[k], pts[k + 1], ncomp, local);
  }
  return total;
}

/// Scalar convenience wrapper.
template <class F>
double integrate_scalar(const F& f, double a, double b, std::vector<double> cuts = {}, const QuadOptions& opt = {}) {
  auto g = [&f](double t) {
    QVec v(1);
    v[0] = f(t);
    return v;
  };
  return integrate_pieces(g, a, b, std::move(cuts), 1, opt)[0];
}

}  // namespace crossreg
