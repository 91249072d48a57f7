#include "crossreg/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "crossreg/error.hpp"

namespace crossreg {

namespace {

using State = std::vector<double>;
namespace odeint = boost::numeric::odeint;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

State hermite(const State& xa, const State& da, const State& xb, const State& db, double h, double th) {
  const double t2 = th * th, t3 = t2 * th;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + th, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  State out(xa.size());
  for (std::size_t i = 0; i < xa.size(); ++i) out[i] = h00 * xa[i] + h10 * h * da[i] + h01 * xb[i] + h11 * h * db[i];
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

bool DomainBox::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < x.size() && i < lo.size(); ++i) {
    if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
  }
  return true;
}

Section Section::hyperplane(std::vector<double> normal, double level, int orientation) {
  const std::size_t n = normal.size();
  const double len = std::sqrt(dot(normal, normal));
  if (n < 2 || len == 0.0) throw Error(ErrorCode::InvalidArgument, "section needs a nonzero normal in dimension >= 2");
  if (orientation < -1 || orientation > 1) throw Error(ErrorCode::InvalidArgument, "orientation must be -1, 0 or 1");
  Section s;
  s.normal = normal;
  s.level = level;
  s.orientation = orientation;
  s.origin.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.origin[i] = level * normal[i] / (len * len);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = normal[i] / len;
  if (n == 2) {
    s.basis.push_back({u[1], -u[0]});
    return s;
  }
  for (std::size_t e = 0; e < n && s.basis.size() + 1 < n; ++e) {
    std::vector<double> v(n, 0.0);
    v[e] = 1.0;
    double p = dot(v, u);
    for (std::size_t i = 0; i < n; ++i) v[i] -= p * u[i];
    for (const auto& b : s.basis) {
      double q = dot(v, b);
      for (std::size_t i = 0; i < n; ++i) v[i] -= q * b[i];
    }
    double vl = std::sqrt(dot(v, v));
    if (vl < 1e-8) continue;
    for (auto& c : v) c /= vl;
    s.basis.push_back(v);
  }
  return s;
}

Section Section::coordinate(std::size_t n, int axis, double level, int orientation) {
  if (axis < 1 || static_cast<std::size_t>(axis) > n) throw Error(ErrorCode::BadAxis, "section axis out of range");
  std::vector<double> normal(n, 0.0);
  normal[static_cast<std::size_t>(axis - 1)] = 1.0;
  return hyperplane(normal, level, orientation);
}

double Section::value(std::span<const double> x) const { return dot(normal, x) - level; }

double Section::normal_rate(std::span<const double> f) const { return dot(normal, f) / std::sqrt(dot(normal, normal)); }

std::vector<double> Section::point(std::span<const double> s) const {
  if (s.size() != basis.size()) throw Error(ErrorCode::InvalidArgument, "section coordinates have wrong size");
  std::vector<double> x = origin;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += s[k] * basis[k][i];
  }
  return x;
}

std::vector<double> Section::coords(std::span<const double> x) const {
  std::vector<double> d(x.begin(), x.end());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= origin[i];
  std::vector<double> s(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) s[k] = dot(basis[k], d);
  return s;
}

nlohmann::json Section::to_json() const { return {{"normal", normal}, {"level", level}, {"orientation", orientation}}; }

std::vector<double> Trajectory::interpolate(double s) const {
  if (t.empty()) throw Error(ErrorCode::InvalidArgument, "empty trajectory");
  if (s <= t.front()) return x.front();
  if (s >= t.back()) return x.back();
  auto it = std::upper_bound(t.begin(), t.end(), s);
  std::size_t k = static_cast<std::size_t>(it - t.begin()) - 1;
  double h = t[k + 1] - t[k];
  return hermite(x[k], dx[k], x[k + 1], dx[k + 1], h, (s - t[k]) / h);
}

std::string Trajectory::to_csv() const {
  std::string out = "t";
  const std::size_t n = x.empty() ? 0 : x.front().size();
  for (std::size_t i = 0; i < n; ++i) out += ",x" + std::to_string(i + 1);
  out += "\n";
  for (std::size_t k = 0; k < t.size(); ++k) {
    out += num(t[k]);
    for (double v : x[k]) out += "," + num(v);
    out += "\n";
  }
  return out;
}

nlohmann::json Trajectory::to_json() const {
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& e : events) ev.push_back({{"section", e.section}, {"t", e.t}, {"x", e.x}});
  return {{"t", t}, {"x", x}, {"events", ev}};
}

Trajectory integrate(const VecField& f, std::span<const double> x0, double t0, double t1, const OdeOptions& opt,
                     const std::vector<Section>& sections, bool stop_at_event) {
  if (!(t1 > t0)) throw Error(ErrorCode::InvalidArgument, "integration interval must be increasing");
  auto sys = [&f](const State& x, State& dx, double) { f(x, dx); };
  auto controlled = odeint::make_controlled(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<State>());
  odeint::runge_kutta_dopri5<State> single;

  State x(x0.begin(), x0.end()), dx(x.size());
  f(x, dx);
  double t = t0;
  double dt = std::min({opt.initial_step, opt.max_step, t1 - t0});
  Trajectory traj;
  traj.t.push_back(t);
  traj.x.push_back(x);
  traj.dx.push_back(dx);
  if (opt.domain && !opt.domain->contains(x)) throw Error(ErrorCode::Escape, "initial point outside the domain");

  std::size_t steps = 0;
  while (t < t1) {
    if (++steps > opt.max_steps) throw Error(ErrorCode::StepFailure, "step budget exhausted at t=" + num(t));
    const State xa = x, da = dx;
    const double ta = t;
    dt = std::min({dt, opt.max_step, t1 - t});
    if (odeint::controlled_step_result::fail == controlled.try_step(sys, x, dx, t, dt)) {
      if (dt < opt.min_step) throw Error(ErrorCode::StepFailure, "step size underflow at t=" + num(t));
      continue;
    }
    const double h = t - ta;

    // Earliest oriented crossing inside (ta, t].
    std::vector<EventRecord> found;
    for (std::size_t k = 0; k < sections.size(); ++k) {
      const Section& sec = sections[k];
      double ga = sec.value(xa), gb = sec.value(x);
      // leaving a section we start on is not a crossing
      if (ta == t0 && std::abs(ga) <= 1e-13 * (1.0 + std::abs(sec.level))) continue;
      if (ga == 0.0 || ((ga < 0.0) == (gb < 0.0) && gb != 0.0)) continue;
      int dir = gb > ga ? 1 : -1;
      if (sec.orientation != 0 && dir != sec.orientation) continue;
      auto g = [&](double th) { return sec.value(hermite(xa, da, x, dx, h, th)); };
      double th = 1.0;
      if (gb != 0.0) {
        boost::uintmax_t iters = 100;
        auto r = boost::math::tools::toms748_solve(g, 0.0, 1.0, ga, gb, boost::math::tools::eps_tolerance<double>(50), iters);
        th = 0.5 * (r.first + r.second);
      }
      double te = ta + th * h;
      State xe(x.size()), de(x.size());
      auto state_at = [&](double s) {
        if (s > ta) {
          single.do_step(sys, xa, da, ta, xe, de, s - ta);
        } else {
          xe = xa;
          de = da;
        }
      };
      // Newton on the crossing time with exact Runge-Kutta states
      for (int it = 0; it < 4; ++it) {
        state_at(te);
        double rate = dot(sec.normal, de);
        if (rate == 0.0) break;
        double next = std::clamp(te - sec.value(xe) / rate, ta, t);
        if (std::abs(next - te) <= 1e-15 * (1.0 + std::abs(te))) break;
        te = next;
      }
      state_at(te);
      found.push_back({k, te, xe});
    }
    std::sort(found.begin(), found.end(), [](const EventRecord& a, const EventRecord& b) { return a.t < b.t; });
    if (stop_at_event && !found.empty()) {
      const auto& e = found.front();
      State de(x.size());
      f(e.x, de);
      traj.t.push_back(e.t);
      traj.x.push_back(e.x);
      traj.dx.push_back(de);
      traj.events.push_back(e);
      return traj;
    }
    for (auto& e : found) traj.events.push_back(std::move(e));
    traj.t.push_back(t);
    traj.x.push_back(x);
    traj.dx.push_back(dx);
    if (opt.domain && !opt.domain->contains(x)) throw Error(ErrorCode::Escape, "left the domain at t=" + num(t));
  }
  return traj;
}

}  // namespace crossreg
