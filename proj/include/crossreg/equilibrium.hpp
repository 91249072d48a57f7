#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "crossreg/multipoly.hpp"
#include "crossreg/ode.hpp"
#include "crossreg/piecewise.hpp"

namespace crossreg {

enum class EquilibriumKind { Saddle, Node, Focus, CenterCandidate, Degenerate };

const char* to_string(EquilibriumKind kind);

struct EquilibriumInfo {
  std::vector<double> location;
  std::vector<std::vector<double>> jacobian;
  double trace = 0.0;
  double determinant = 0.0;
  double discriminant = 0.0;
  std::vector<std::complex<double>> eigenvalues;
  EquilibriumKind kind = EquilibriumKind::Degenerate;

  nlohmann::json to_json() const;
};

/// Jacobian of a polynomial field whose ring is exactly its state variables.
std::vector<VectorPoly> jacobian(const VectorPoly& field);

/// Planar: degenerate iff |det| <= tol, saddle iff det < 0, otherwise focus or
/// node by the discriminant and center-candidate when |trace| <= tol.
/// Spatial: the same labels from the eigenvalues (mixed real-part signs count
/// as a saddle).
EquilibriumInfo classify_equilibrium(const VectorPoly& field, std::span<const double> point, double tol = 1e-10);

/// Newton with the exact Jacobian. Errors: NoConvergence.
std::vector<double> locate_equilibrium(const VectorPoly& field, std::span<const double> guess, double tol = 1e-13,
                                       int max_iterations = 50);

/// New state coordinates X = A x + b with exact rational entries.
struct AffineChange {
  std::vector<std::vector<Rational>> A;
  std::vector<Rational> b;
  std::vector<std::string> names;

  static AffineChange identity(const std::vector<std::string>& names);
  /// Errors: SingularChange.
  AffineChange inverse(const std::vector<std::string>& old_names) const;
};

/// Field in the new coordinates: X' = A x' at x = A^-1 (X - b). The first
/// field.size() ring variables are the state; the rest are parameters and are
/// carried along. Terms of total state degree above `order` are dropped
/// (order < 0 keeps everything). Errors: SingularChange, InvalidArgument.
VectorPoly jet_transform(const VectorPoly& field, const AffineChange& change, int order = -1);

/// (x y + (y - x)/2 - B - 1/4) e^(y - x), conserved on the stratum C = 1, B = D.
double darboux_H(double x, double y, double B);

/// Largest |H - H0| / max(|H0|, 1e-12) over the trajectory samples.
double first_integral_drift(const Trajectory& trajectory, double B);

/// f = (x + 1/2)(y + 1/2) - B, g = C (x - 1/2)(y - 1/2) - D.
VectorPoly planar_cross_field(const Rational& C, const Rational& B, const Rational& D);

/// Y_C = (x - z, x - z - x y, y - z).
VectorPoly spatial_cross_field();

}  // namespace crossreg
