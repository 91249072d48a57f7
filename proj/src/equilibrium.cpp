#include "crossreg/equilibrium.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "crossreg/error.hpp"

namespace crossreg {

const char* to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::Saddle: return "saddle";
    case EquilibriumKind::Node: return "node";
    case EquilibriumKind::Focus: return "focus";
    case EquilibriumKind::CenterCandidate: return "center-candidate";
    case EquilibriumKind::Degenerate: return "degenerate";
  }
  return "unknown";
}

nlohmann::json EquilibriumInfo::to_json() const {
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& e : eigenvalues) ev.push_back({{"re", e.real()}, {"im", e.imag()}});
  return {{"location", location},         {"jacobian", jacobian},         {"trace", trace},
          {"determinant", determinant},   {"discriminant", discriminant}, {"eigenvalues", ev},
          {"classification", to_string(kind)}};
}

std::vector<VectorPoly> jacobian(const VectorPoly& field) {
  if (field.empty() || field[0].nvars() != field.size()) {
    throw Error(ErrorCode::InvalidArgument, "field ring must consist of its state variables");
  }
  std::vector<VectorPoly> J(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    for (std::size_t j = 0; j < field.size(); ++j) J[i].push_back(field[i].derivative(j));
  }
  return J;
}

EquilibriumInfo classify_equilibrium(const VectorPoly& field, std::span<const double> point, double tol) {
  const auto J = jacobian(field);
  const std::size_t n = field.size();
  if (point.size() != n) throw Error(ErrorCode::InvalidArgument, "point has wrong dimension");
  EquilibriumInfo info;
  info.location.assign(point.begin(), point.end());
  Eigen::MatrixXd M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  info.jacobian.assign(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      info.jacobian[i][j] = J[i][j].evaluate(point);
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = info.jacobian[i][j];
    }
  }
  info.trace = M.trace();
  info.determinant = M.determinant();
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) info.eigenvalues.push_back(es.eigenvalues()(i));

  if (std::abs(info.determinant) <= tol) {
    info.kind = EquilibriumKind::Degenerate;
    return info;
  }
  if (n == 2) {
    info.discriminant = info.trace * info.trace - 4.0 * info.determinant;
    if (info.determinant < 0.0) {
      info.kind = EquilibriumKind::Saddle;
    } else if (std::abs(info.trace) <= tol) {
      info.kind = EquilibriumKind::CenterCandidate;
    } else {
      info.kind = info.discriminant >= 0.0 ? EquilibriumKind::Node : EquilibriumKind::Focus;
    }
    return info;
  }
  bool pos = false, neg = false, complex = false, neutral = false;
  for (const auto& e : info.eigenvalues) {
    if (e.real() > tol) pos = true;
    if (e.real() < -tol) neg = true;
    if (std::abs(e.real()) <= tol) neutral = true;
    if (std::abs(e.imag()) > tol) complex = true;
  }
  if (pos && neg) {
    info.kind = EquilibriumKind::Saddle;
  } else if (neutral) {
    info.kind = EquilibriumKind::CenterCandidate;
  } else {
    info.kind = complex ? EquilibriumKind::Focus : EquilibriumKind::Node;
  }
  return info;
}

std::vector<double> locate_equilibrium(const VectorPoly& field, std::span<const double> guess, double tol,
                                       int max_iterations) {
  const auto J = jacobian(field);
  const auto n = static_cast<Eigen::Index>(field.size());
  std::vector<double> x(guess.begin(), guess.end());
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd r(n);
    Eigen::MatrixXd M(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      r(i) = field[static_cast<std::size_t>(i)].evaluate(x);
      for (Eigen::Index j = 0; j < n; ++j) M(i, j) = J[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].evaluate(x);
    }
    if (r.norm() <= tol) return x;
    Eigen::VectorXd d = M.fullPivLu().solve(-r);
    if (!d.allFinite()) break;
    for (Eigen::Index i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] += d(i);
  }
  throw Error(ErrorCode::NoConvergence, "equilibrium Newton did not converge");
}

AffineChange AffineChange::identity(const std::vector<std::string>& names) {
  AffineChange c;
  c.names = names;
  c.b.assign(names.size(), Rational(0));
  c.A.assign(names.size(), std::vector<Rational>(names.size(), Rational(0)));
  for (std::size_t i = 0; i < names.size(); ++i) c.A[i][i] = 1;
  return c;
}

AffineChange AffineChange::inverse(const std::vector<std::string>& old_names) const {
  const std::size_t n = A.size();
  if (b.size() != n || old_names.size() != n) throw Error(ErrorCode::InvalidArgument, "affine change has inconsistent sizes");
  // Gauss-Jordan on [A | I]
  std::vector<std::vector<Rational>> M(n, std::vector<Rational>(2 * n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    if (A[i].size() != n) throw Error(ErrorCode::InvalidArgument, "affine change matrix is not square");
    for (std::size_t j = 0; j < n; ++j) M[i][j] = A[i][j];
    M[i][n + i] = 1;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && M[p][c] == 0) ++p;
    if (p == n) throw Error(ErrorCode::SingularChange, "coordinate change is not invertible");
    std::swap(M[p], M[c]);
    const Rational piv = M[c][c];
    for (auto& v : M[c]) v /= piv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || M[r][c] == 0) continue;
      const Rational k = M[r][c];
      for (std::size_t j = 0; j < 2 * n; ++j) M[r][j] -= k * M[c][j];
    }
  }
  AffineChange inv;
  inv.names = old_names;
  inv.A.assign(n, std::vector<Rational>(n));
  inv.b.assign(n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      inv.A[i][j] = M[i][n + j];
      inv.b[i] -= inv.A[i][j] * b[j];
    }
  }
  return inv;
}

VectorPoly jet_transform(const VectorPoly& field, const AffineChange& change, int order) {
  const std::size_t n = field.size();
  if (n == 0 || change.A.size() != n || change.names.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "coordinate change does not match the field dimension");
  }
  const auto& old_vars = field[0].variables();
  if (old_vars.size() < n) throw Error(ErrorCode::InvalidArgument, "field ring is missing state variables");
  std::vector<std::string> old_state(old_vars.begin(), old_vars.begin() + static_cast<std::ptrdiff_t>(n));
  auto inv = change.inverse(old_state);

  std::vector<std::string> vars = change.names;
  vars.insert(vars.end(), old_vars.begin() + static_cast<std::ptrdiff_t>(n), old_vars.end());
  // x_i = sum_j inv.A[i][j] X_j + inv.b[i]; parameters map to themselves
  std::vector<MultiPoly> images;
  for (std::size_t i = 0; i < n; ++i) {
    MultiPoly img = MultiPoly::constant(vars, inv.b[i]);
    for (std::size_t j = 0; j < n; ++j) {
      if (inv.A[i][j] != 0) img += inv.A[i][j] * MultiPoly::variable(vars, j);
    }
    images.push_back(img);
  }
  for (std::size_t k = n; k < vars.size(); ++k) images.push_back(MultiPoly::variable(vars, k));

  std::vector<MultiPoly> pulled;
  for (const auto& f : field) pulled.push_back(f.substitute(images));
  std::vector<std::size_t> state(n);
  for (std::size_t i = 0; i < n; ++i) state[i] = i;
  VectorPoly out;
  for (std::size_t i = 0; i < n; ++i) {
    MultiPoly c(vars);
    for (std::size_t j = 0; j < n; ++j) {
      if (change.A[i][j] != 0) c += change.A[i][j] * pulled[j];
    }
    out.push_back(order < 0 ? c : c.truncate(order, state));
  }
  return out;
}

double darboux_H(double x, double y, double B) { return (x * y + 0.5 * (y - x) - B - 0.25) * std::exp(y - x); }

double first_integral_drift(const Trajectory& trajectory, double B) {
  if (trajectory.x.empty()) throw Error(ErrorCode::InvalidArgument, "empty trajectory");
  const double h0 = darboux_H(trajectory.x[0][0], trajectory.x[0][1], B);
  const double scale = std::max(std::abs(h0), 1e-12);
  double worst = 0.0;
  for (const auto& p : trajectory.x) worst = std::max(worst, std::abs(darboux_H(p[0], p[1], B) - h0) / scale);
  return worst;
}

VectorPoly planar_cross_field(const Rational& C, const Rational& B, const Rational& D) {
  const std::vector<std::string> v = {"x", "y"};
  const Rational h(1, 2);
  auto x = MultiPoly::variable(v, 0), y = MultiPoly::variable(v, 1);
  auto one = MultiPoly::constant(v, 1);
  return {(x + h * one) * (y + h * one) - B * one, C * ((x - h * one) * (y - h * one)) - D * one};
}

VectorPoly spatial_cross_field() {
  const std::vector<std::string> v = {"x", "y", "z"};
  return {parse_poly("x - z", v), parse_poly("x - z - x*y", v), parse_poly("y - z", v)};
}

}  // namespace crossreg
