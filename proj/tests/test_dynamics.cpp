#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "crossreg/error.hpp"
#include "crossreg/poincare.hpp"

using namespace crossreg;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

PiecewiseField lambda_field(double lam) {
  std::vector<std::string> vars = {"x", "y"};
  const std::string u = "(x + " + g17(lam) + ")";
  VectorPoly plus = {parse_poly("1", vars), parse_poly("-3*" + u + "^2 + 2*" + u + " + 7/4", vars)};
  VectorPoly minus = {parse_poly("-1", vars), parse_poly("3*x^2 - 7*x + 2", vars)};
  return PiecewiseField(NormalCrossingsLocus(2, {2}), vars, {plus, minus});
}

std::vector<SewingStep> lambda_plan() {
  return {{Section::coordinate(2, 2, 0.0, -1), 0}, {Section::coordinate(2, 2, 0.0, 1), 1}};
}

TransitionOptions tight() {
  TransitionOptions o;
  o.ode.rtol = 1e-12;
  o.ode.atol = 1e-14;
  return o;
}

}  // namespace

TEST_CASE("integrator on trivial fields") {
  VecField drift = [](std::span<const double>, std::span<double> dx) { dx[0] = 1.0; dx[1] = 0.0; };
  std::vector<double> x0 = {0.0, 0.0};
  auto tr = integrate(drift, x0, 0.0, 1.0);
  CHECK(tr.x.back()[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(tr.x.back()[1]) < 1e-12);

  VecField decay = [](std::span<const double> x, std::span<double> dx) { dx[0] = -x[0]; };
  std::vector<double> one = {2.0};
  auto d = integrate(decay, one, 0.0, 1.0);
  CHECK(std::abs(d.x.back()[0] - 2.0 * std::exp(-1.0)) < 1e-8);
  CHECK(d.interpolate(0.5)[0] == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-8));
}

TEST_CASE("harmonic oscillator energy drift") {
  VecField osc = [](std::span<const double> x, std::span<double> dx) { dx[0] = x[1]; dx[1] = -x[0]; };
  std::vector<double> x0 = {1.0, 0.0};
  auto tr = integrate(osc, x0, 0.0, 100.0);
  double worst = 0.0;
  for (const auto& x : tr.x) worst = std::max(worst, std::abs(x[0] * x[0] + x[1] * x[1] - 1.0));
  CHECK(worst < 1e-7);
}

TEST_CASE("step failure and escape") {
  VecField blow = [](std::span<const double> x, std::span<double> dx) { dx[0] = x[0] * x[0]; };
  std::vector<double> x0 = {1.0};
  CHECK_THROWS_AS(integrate(blow, x0, 0.0, 2.0), Error);
  OdeOptions o;
  o.domain = DomainBox{{-10.0}, {10.0}};
  try {
    integrate(blow, x0, 0.0, 2.0, o);
    FAIL("expected escape");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Escape);
  }
}

TEST_CASE("events are located and oriented") {
  VecField osc = [](std::span<const double> x, std::span<double> dx) { dx[0] = x[1]; dx[1] = -x[0]; };
  std::vector<double> x0 = {1.0, 0.0};
  auto tr = integrate(osc, x0, 0.0, 10.0, {}, {Section::coordinate(2, 2, 0.0, 1)});
  // y = -sin t crosses upward at t = pi, 3pi
  REQUIRE(tr.events.size() == 2);
  CHECK(tr.events[0].t == doctest::Approx(M_PI).epsilon(1e-11));
  CHECK(tr.events[1].t == doctest::Approx(3 * M_PI).epsilon(1e-11));
}

TEST_CASE("transition maps with closed-form flows") {
  auto x0 = Section::coordinate(2, 1, 0.0, 1);
  auto x1 = Section::coordinate(2, 1, 1.0, 1);
  VecField flat = [](std::span<const double>, std::span<double> dx) { dx[0] = 1.0; dx[1] = 0.0; };
  std::vector<double> s = {0.3};
  // basis of {x = c} is (0, -1): coordinate is -y
  auto r = transition_map(flat, x0, s, x1);
  CHECK(r.coords[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(r.derivative[0][0] == doctest::Approx(1.0).epsilon(1e-8));

  VecField lin = [](std::span<const double> x, std::span<double> dx) { dx[0] = 1.0; dx[1] = x[1]; };
  auto e = transition_map(lin, x0, s, x1, tight());
  CHECK(e.coords[0] == doctest::Approx(0.3 * M_E).epsilon(1e-10));
  CHECK(e.derivative[0][0] == doctest::Approx(M_E).epsilon(1e-8));
  CHECK(e.time == doctest::Approx(1.0).epsilon(1e-12));

  auto far = Section::coordinate(2, 1, -1.0, 0);
  TransitionOptions shortrun;
  shortrun.t_max = 5.0;
  CHECK_THROWS_AS(transition_map(flat, x0, s, far, shortrun), Error);
  VecField along = [](std::span<const double>, std::span<double> dx) { dx[0] = 0.0; dx[1] = 1.0; };
  try {
    transition_map(along, x0, s, x1);
    FAIL("expected tangency");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::Tangency);
  }
}

TEST_CASE("upper branch transition agrees with direct integration") {
  auto field = lambda_field(0.4);
  auto up = Section::coordinate(2, 2, 0.0, 1);
  auto down = Section::coordinate(2, 2, 0.0, -1);
  VecField plus = [&](std::span<const double> x, std::span<double> dx) {
    auto v = field.evaluate_branch(0, x);
    dx[0] = v[0];
    dx[1] = v[1];
  };
  std::vector<double> s = {-0.2};
  auto r = transition_map(plus, up, s, down, tight());
  std::vector<double> p0 = {-0.2, 0.0};
  auto direct = integrate(plus, p0, 0.0, r.time, tight().ode);
  CHECK(std::abs(direct.x.back()[0] - r.point[0]) < 1e-9);
  CHECK(std::abs(direct.x.back()[1]) < 1e-9);
  // x' = 1 on the upper branch, so F_+(x) is conserved along y
  auto F = [](double x) { double u = x + 0.4; return -u * u * u + u * u + 1.75 * u; };
  CHECK(F(r.point[0]) == doctest::Approx(F(-0.2)).epsilon(1e-10));
}

TEST_CASE("contraction fixed point") {
  ReturnMap half = [](std::span<const double> s) { return std::vector<double>{0.5 * s[0]}; };
  std::vector<double> seed = {1.0};
  auto r = find_cycle(half, seed);
  CHECK(std::abs(r.fixed_point[0]) < 1e-10);
  CHECK(r.multipliers[0].real() == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(r.hyperbolic);
  ReturnMap shift = [](std::span<const double> s) { return std::vector<double>{s[0] + 1.0}; };
  CHECK_THROWS_AS(find_cycle(shift, seed), Error);
}

TEST_CASE("mirror branches give the identity return") {
  // constant fields turning a quarter in each quadrant, all crossings at 45 degrees
  std::vector<std::string> vars = {"x", "y"};
  auto v = [&](const char* a, const char* b) { return VectorPoly{parse_poly(a, vars), parse_poly(b, vars)}; };
  PiecewiseField field(NormalCrossingsLocus(2, {1, 2}), vars, {v("-1", "1"), v("-1", "-1"), v("1", "1"), v("1", "-1")});
  std::vector<SewingStep> plan = {{Section::coordinate(2, 1, 0.0, -1), 0},
                                  {Section::coordinate(2, 2, 0.0, -1), 1},
                                  {Section::coordinate(2, 1, 0.0, 1), 3},
                                  {Section::coordinate(2, 2, 0.0, 1), 2}};
  for (double s0 : {0.3, 1.7}) {
    std::vector<double> s = {s0};
    CHECK(sewing_map(field, plan, s)[0] == doctest::Approx(s0).epsilon(1e-12));
  }
  std::vector<double> seed = {0.5};
  auto cyc = sewing_poincare(field, plan, seed);
  CHECK(cyc.result.multipliers[0].real() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_FALSE(cyc.result.hyperbolic);
  CHECK(cyc.segments.size() == 4);
  // no divergence, equal norms and angles: the product formula gives 1
  CHECK(divergence_derivative(field, cyc.segments) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sewing cycle of the lambda family") {
  auto field = lambda_field(0.4);
  std::vector<double> seed = {-0.4};
  auto cyc = sewing_poincare(field, lambda_plan(), seed, tight());
  CHECK(cyc.result.fixed_point[0] == doctest::Approx(-0.42).epsilon(0.02));
  CHECK(std::abs(cyc.result.multipliers[0]) < 1.0);
  CHECK(cyc.result.hyperbolic);
  CHECK(cyc.result.residual < 1e-10);
  REQUIRE(cyc.segments.size() == 2);
  CHECK(cyc.result.return_time == doctest::Approx(cyc.segments[0].time + cyc.segments[1].time));

  SUBCASE("chain rule over the segments") {
    const auto& sec = lambda_plan();
    std::vector<double> s = cyc.result.fixed_point;
    VecField up = [&](std::span<const double> x, std::span<double> dx) {
      for (std::size_t c = 0; c < 2; ++c) dx[c] = field.compiled(0, c)(x);
    };
    VecField dn = [&](std::span<const double> x, std::span<double> dx) {
      for (std::size_t c = 0; c < 2; ++c) dx[c] = field.compiled(1, c)(x);
    };
    auto a = transition_map(up, sec[1].to, s, sec[0].to, tight());
    auto b = transition_map(dn, sec[0].to, a.coords, sec[1].to, tight());
    double chain = a.derivative[0][0] * b.derivative[0][0];
    CHECK(chain == doctest::Approx(cyc.result.jacobian[0][0]).epsilon(1e-6));
  }

  SUBCASE("divergence formula against finite differences") {
    double formula = divergence_derivative(field, cyc.segments, tight().ode);
    CHECK(formula == doctest::Approx(cyc.result.jacobian[0][0]).epsilon(1e-6));
  }
}

TEST_CASE("lambda family with a sliding crossing") {
  auto field = lambda_field(-0.4);
  std::vector<double> seed = {-0.05};
  try {
    sewing_poincare(field, lambda_plan(), seed, tight());
    FAIL("expected sliding");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SlidingDetected);
  }
}

TEST_CASE("divergence integral of a polynomial branch is exact") {
  // X = (1, x y): div = x, orbit from (0, 1) has x = t, so the integral is T^2 / 2
  std::vector<std::string> vars = {"x", "y"};
  VectorPoly b = {parse_poly("1", vars), parse_poly("x*y", vars)};
  PiecewiseField field(NormalCrossingsLocus(2, {2}), vars, {b, b});
  auto from = Section::coordinate(2, 1, 0.0, 1);
  auto to = Section::coordinate(2, 1, 1.5, 1);
  SewingSegment seg{0, from, to, {0.0, 1.0}, {1.5, std::exp(1.125)}, 1.5, {}};
  // angles: n.X / |X| on {x = c} is 1 / |X|, so the factor is exp(T^2 / 2)
  CHECK(divergence_derivative(field, {seg}, tight().ode) == doctest::Approx(std::exp(1.125)).epsilon(1e-10));
  VecField f = [](std::span<const double> x, std::span<double> dx) { dx[0] = 1.0; dx[1] = x[0] * x[1]; };
  std::vector<double> s = {-1.0};
  auto r = transition_map(f, from, s, to, tight());
  CHECK(r.derivative[0][0] == doctest::Approx(std::exp(1.125)).epsilon(1e-7));
}

TEST_CASE("orbits do not depend on a positive time rescaling") {
  VecField osc = [](std::span<const double> x, std::span<double> dx) { dx[0] = x[1]; dx[1] = -x[0] - 0.1 * x[1]; };
  VecField slow = [&](std::span<const double> x, std::span<double> dx) {
    osc(x, dx);
    double g = 1.0 + x[0] * x[0] + 0.5 * x[1] * x[1];
    for (auto& c : dx) c *= g;
  };
  auto ray = Section::hyperplane({0.0, 1.0}, 0.0, 1);
  std::vector<double> s = {1.0};
  auto a = transition_map(osc, ray, s, ray, tight());
  auto b = transition_map(slow, ray, s, ray, tight());
  CHECK(std::abs(a.coords[0] - b.coords[0]) < 1e-9);
  auto dense = [](const Trajectory& tr) {
    Polyline p;
    for (int k = 0; k <= 4000; ++k) p.push_back(tr.interpolate(tr.t.back() * k / 4000.0));
    return p;
  };
  CHECK(hausdorff(dense(a.path), dense(b.path)) < 1e-6);
}

TEST_CASE("hausdorff distance of segments") {
  Polyline a = {{0.0, 0.0}, {1.0, 0.0}};
  Polyline b = {{0.0, 0.5}, {0.5, 0.5}, {1.0, 0.5}};
  CHECK(hausdorff(a, b) == doctest::Approx(0.5).epsilon(1e-12));
  Polyline c = {{0.0, 0.0}, {2.0, 0.0}};
  CHECK(hausdorff(a, c) == doctest::Approx(1.0).epsilon(1e-12));
}
