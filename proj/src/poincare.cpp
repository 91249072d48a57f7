#include "crossreg/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <Eigen/Dense>

#include "crossreg/error.hpp"

namespace crossreg {

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

void check_transverse(const Section& sec, std::span<const double> f, double threshold, const char* where) {
  if (std::abs(sec.normal_rate(f)) < threshold * norm(f) || norm(f) == 0.0) {
    throw Error(ErrorCode::Tangency, std::string("field tangent to the section at the ") + where);
  }
}

VecField branch_field(const PiecewiseField& field, std::size_t b) {
  return [&field, b](std::span<const double> x, std::span<double> dx) {
    for (std::size_t c = 0; c < dx.size(); ++c) dx[c] = field.compiled(b, c)(x);
  };
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.empty() ? 0 : m[0].size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[i].size(); ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j];
  }
  return e;
}

std::vector<double> residual(const ReturnMap& P, std::span<const double> s) {
  auto r = P(s);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= s[i];
  return r;
}

}  // namespace

TransitionResult transition_map(const VecField& f, const Section& from, std::span<const double> s, const Section& to,
                                const TransitionOptions& opt) {
  auto x0 = from.point(s);
  std::vector<double> f0(x0.size());
  f(x0, f0);
  check_transverse(from, f0, opt.transversality, "start");
  auto path = integrate(f, x0, 0.0, opt.t_max, opt.ode, {to}, true);
  if (path.events.empty()) throw Error(ErrorCode::NoCrossing, "no crossing of the target section before t_max");
  const auto& e = path.events.back();
  std::vector<double> fe(e.x.size());
  f(e.x, fe);
  check_transverse(to, fe, opt.transversality, "target crossing");
  TransitionResult out;
  out.point = e.x;
  out.coords = to.coords(e.x);
  out.time = e.t;
  if (opt.derivative) {
    TransitionOptions inner = opt;
    inner.derivative = false;
    ReturnMap P = [&](std::span<const double> q) { return transition_map(f, from, q, to, inner).coords; };
    out.derivative = fd_jacobian(P, s, opt.fd_step);
  }
  out.path = std::move(path);
  return out;
}

Matrix fd_jacobian(const ReturnMap& P, std::span<const double> s, double step) {
  std::vector<double> q(s.begin(), s.end());
  Matrix J;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double h = step * std::max(1.0, std::abs(s[i]));
    q[i] = s[i] + h;
    auto plus = P(q);
    q[i] = s[i] - h;
    auto minus = P(q);
    q[i] = s[i];
    if (J.empty()) J.assign(plus.size(), std::vector<double>(q.size()));
    for (std::size_t r = 0; r < plus.size(); ++r) J[r][i] = (plus[r] - minus[r]) / (2.0 * h);
  }
  return J;
}

nlohmann::json PoincareResult::to_json() const {
  nlohmann::json mu = nlohmann::json::array();
  for (const auto& m : multipliers) mu.push_back({{"re", m.real()}, {"im", m.imag()}});
  return {{"fixed_point", fixed_point}, {"point", point},           {"return_time", return_time}, {"jacobian", jacobian},
          {"multipliers", mu},          {"residual", residual},     {"iterations", iterations},   {"hyperbolic", hyperbolic}};
}

PoincareResult find_cycle(const ReturnMap& P, std::span<const double> seed, const CycleOptions& opt) {
  std::vector<double> s(seed.begin(), seed.end());
  const std::size_t d = s.size();
  auto r = residual(P, s);
  double rn = norm(r);
  int it = 0;
  while (rn >= opt.tol) {
    if (it >= opt.max_iterations) throw Error(ErrorCode::NoConvergence, "Newton did not converge, residual " + std::to_string(rn));
    ++it;
    Eigen::MatrixXd J = to_eigen(fd_jacobian(P, s, opt.fd_step)) - Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    Eigen::VectorXd rv = Eigen::Map<Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(d));
    Eigen::VectorXd delta = J.fullPivLu().solve(-rv);
    bool accepted = false;
    for (double lam = 1.0; lam > 1e-6; lam *= 0.5) {
      std::vector<double> trial(s);
      for (std::size_t i = 0; i < d; ++i) trial[i] += lam * delta(static_cast<Eigen::Index>(i));
      try {
        auto rt = residual(P, trial);
        double tn = norm(rt);
        if (tn < rn) {
          s = std::move(trial);
          r = std::move(rt);
          rn = tn;
          accepted = true;
          break;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoCrossing && e.code() != ErrorCode::Tangency && e.code() != ErrorCode::Escape) throw;
      }
    }
    if (!accepted) throw Error(ErrorCode::NoConvergence, "line search failed, residual " + std::to_string(rn));
  }
  PoincareResult out;
  out.fixed_point = s;
  out.residual = rn;
  out.iterations = it;
  out.jacobian = fd_jacobian(P, s, opt.fd_step);
  Eigen::EigenSolver<Eigen::MatrixXd> es(to_eigen(out.jacobian));
  out.hyperbolic = true;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    out.multipliers.push_back(es.eigenvalues()(i));
    if (std::abs(out.multipliers.back() - 1.0) <= opt.margin) out.hyperbolic = false;
  }
  return out;
}

std::vector<double> sewing_map(const PiecewiseField& field, const std::vector<SewingStep>& plan, std::span<const double> s,
                               const TransitionOptions& opt, std::vector<SewingSegment>* segments) {
  if (plan.empty()) throw Error(ErrorCode::InvalidArgument, "empty sewing plan");
  TransitionOptions inner = opt;
  inner.derivative = false;
  std::vector<double> cur(s.begin(), s.end());
  const std::size_t n = static_cast<std::size_t>(field.dimension());
  std::vector<double> next_f(n);
  if (segments) segments->clear();
  for (std::size_t k = 0; k < plan.size(); ++k) {
    const Section& from = k == 0 ? plan.back().to : plan[k - 1].to;
    const Section& to = plan[k].to;
    const std::size_t b = plan[k].branch;
    if (b >= field.branch_count()) throw Error(ErrorCode::InvalidArgument, "sewing plan names a missing branch");
    auto tr = transition_map(branch_field(field, b), from, cur, to, inner);
    // sewing: the next branch leaves the crossing point the same way
    const std::size_t nb = plan[(k + 1) % plan.size()].branch;
    auto here = field.evaluate_branch(b, tr.point);
    auto there = field.evaluate_branch(nb, tr.point);
    check_transverse(to, there, opt.transversality, "crossing (next branch)");
    if (to.normal_rate(here) * to.normal_rate(there) < 0.0) {
      throw Error(ErrorCode::SlidingDetected, "branches " + std::to_string(b) + " and " + std::to_string(nb) +
                                                  " point into the section from both sides at s=" + std::to_string(tr.coords[0]));
    }
    if (segments) segments->push_back({b, from, to, from.point(cur), tr.point, tr.time, std::move(tr.path)});
    cur = tr.coords;
  }
  return cur;
}

SewingCycle sewing_poincare(const PiecewiseField& field, const std::vector<SewingStep>& plan, std::span<const double> seed,
                            const TransitionOptions& topt, const CycleOptions& copt) {
  ReturnMap P = [&](std::span<const double> s) { return sewing_map(field, plan, s, topt); };
  SewingCycle out;
  out.result = find_cycle(P, seed, copt);
  sewing_map(field, plan, out.result.fixed_point, topt, &out.segments);
  out.result.point = plan.back().to.point(out.result.fixed_point);
  for (const auto& seg : out.segments) out.result.return_time += seg.time;
  return out;
}

VecField regularized_vector_field(const RegularizedField& rf, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "regularized field needs eps > 0");
  auto held = std::make_shared<const RegularizedField>(rf);
  return [held, eps](std::span<const double> x, std::span<double> dx) {
    auto v = held->evaluate(x, eps);
    std::copy(v.begin(), v.end(), dx.begin());
  };
}

std::vector<double> regularized_return(const RegularizedField& rf, double eps, const Section& section,
                                       std::span<const double> s, const TransitionOptions& opt) {
  TransitionOptions inner = opt;
  inner.derivative = false;
  return transition_map(regularized_vector_field(rf, eps), section, s, section, inner).coords;
}

PoincareResult regularized_poincare(const RegularizedField& rf, double eps, const Section& section,
                                    std::span<const double> seed, const TransitionOptions& topt,
                                    const CycleOptions& copt, const std::vector<SewingStep>& plan) {
  if (eps < 0.0) throw Error(ErrorCode::InvalidArgument, "eps must be nonnegative");
  if (eps == 0.0) {
    if (plan.empty()) throw Error(ErrorCode::InvalidArgument, "eps = 0 needs a sewing plan");
    return sewing_poincare(rf.base(), plan, seed, topt, copt).result;
  }
  auto f = regularized_vector_field(rf, eps);
  TransitionOptions inner = topt;
  inner.derivative = false;
  ReturnMap P = [&](std::span<const double> s) { return transition_map(f, section, s, section, inner).coords; };
  auto out = find_cycle(P, seed, copt);
  auto tr = transition_map(f, section, out.fixed_point, section, inner);
  out.point = section.point(out.fixed_point);
  out.return_time = tr.time;
  return out;
}

double divergence_derivative(const PiecewiseField& field, const std::vector<SewingSegment>& segments, const OdeOptions& opt,
                             double min_sine) {
  if (field.dimension() != 2) throw Error(ErrorCode::InvalidArgument, "divergence formula is planar");
  double value = 1.0;
  for (const auto& seg : segments) {
    const auto& X = field.branch(seg.branch);
    CompiledPoly div(X[0].derivative(0) + X[1].derivative(1));
    auto in = field.evaluate_branch(seg.branch, seg.entry);
    auto out = field.evaluate_branch(seg.branch, seg.exit);
    double sin_in = seg.from.normal_rate(in) / norm(in);
    double sin_out = seg.to.normal_rate(out) / norm(out);
    if (std::abs(sin_in) < min_sine || std::abs(sin_out) < min_sine) {
      throw Error(ErrorCode::DegenerateAngle, "crossing angle below threshold");
    }
    double integral = 0.0;
    if (seg.time > 0.0) {
      // integral of div along the orbit, carried as an extra state
      VecField aug = [&](std::span<const double> x, std::span<double> dx) {
        for (std::size_t c = 0; c < 2; ++c) dx[c] = field.compiled(seg.branch, c)(x.first(2));
        dx[2] = div(x.first(2));
      };
      std::vector<double> start = {seg.entry[0], seg.entry[1], 0.0};
      integral = integrate(aug, start, 0.0, seg.time, opt).x.back()[2];
    }
    value *= norm(in) * sin_in / (norm(out) * sin_out) * std::exp(integral);
  }
  return value;
}

namespace {

Polyline resample(const Polyline& p, std::size_t samples) {
  std::vector<double> cum{0.0};
  for (std::size_t k = 1; k < p.size(); ++k) {
    double d = 0.0;
    for (std::size_t i = 0; i < p[k].size(); ++i) d += (p[k][i] - p[k - 1][i]) * (p[k][i] - p[k - 1][i]);
    cum.push_back(cum.back() + std::sqrt(d));
  }
  Polyline out;
  std::size_t seg = 0;
  for (std::size_t j = 0; j < samples; ++j) {
    double target = samples == 1 ? 0.0 : cum.back() * static_cast<double>(j) / static_cast<double>(samples - 1);
    while (seg + 2 < p.size() && cum[seg + 1] < target) ++seg;
    double len = cum[seg + 1] - cum[seg];
    double u = len > 0.0 ? std::clamp((target - cum[seg]) / len, 0.0, 1.0) : 0.0;
    std::vector<double> q(p[seg].size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = p[seg][i] + u * (p[seg + 1][i] - p[seg][i]);
    out.push_back(std::move(q));
  }
  return out;
}

double distance_to_polyline(const std::vector<double>& q, const Polyline& p) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    double dd = 0.0, qd = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      double e = p[k + 1][i] - p[k][i];
      dd += e * e;
      qd += (q[i] - p[k][i]) * e;
    }
    double u = dd > 0.0 ? std::clamp(qd / dd, 0.0, 1.0) : 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      double c = p[k][i] + u * (p[k + 1][i] - p[k][i]) - q[i];
      s += c * c;
    }
    best = std::min(best, s);
  }
  return std::sqrt(best);
}

double directed(const Polyline& a, const Polyline& b, std::size_t samples) {
  double worst = 0.0;
  for (const auto& q : resample(a, samples)) worst = std::max(worst, distance_to_polyline(q, b));
  return worst;
}

}  // namespace

double hausdorff(const Polyline& a, const Polyline& b, std::size_t samples) {
  if (a.size() < 2 || b.size() < 2) throw Error(ErrorCode::InvalidArgument, "polylines need two points");
  return std::max(directed(a, b, samples), directed(b, a, samples));
}

}  // namespace crossreg
