#include <doctest.h>

#include "crossreg/error.hpp"
#include "crossreg/smoothing.hpp"

using namespace crossreg;

namespace {

PiecewiseField field(int n, const std::vector<int>& axes, const std::vector<std::vector<std::string>>& comps) {
  std::vector<std::string> vars = {"x", "y", "z"};
  vars.resize(static_cast<std::size_t>(n));
  std::vector<VectorPoly> branches;
  for (const auto& b : comps) {
    VectorPoly v;
    for (const auto& c : b) v.push_back(parse_poly(c, vars));
    branches.push_back(v);
  }
  return PiecewiseField(NormalCrossingsLocus(n, axes), vars, branches);
}

SmoothOptions quick() {
  SmoothOptions o;
  o.grid_points = 7;
  o.truncation_points = 4;
  return o;
}

}  // namespace

TEST_CASE("neville extrapolation is exact on polynomials") {
  std::vector<double> h = {0.1, 0.05, 0.025, 0.0125};
  std::vector<double> v;
  for (double t : h) v.push_back(2.0 - 3.0 * t + 0.5 * t * t * t);
  CHECK(neville_at_zero(h, v) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("one discontinuity axis: every atlas chart is smooth") {
  for (double eta : {0.0, 0.3}) {
    auto m = eta == 0.0 ? Mollifier::box() : Mollifier::plateau(eta);
    RegularizedField rf(field(2, {1}, {{"-1 + y^2", "x - y"}, {"1 + x*y", "2"}}), m);
    auto plan = smoothing_plan(rf.base().locus());
    REQUIRE(plan.atlas.size() == 3);
    for (const auto& pc : plan.atlas) {
      ChartReport r;
      CHECK_NOTHROW(r = verify_smooth(rf, pc, quick()));
      CHECK(r.checks.size() == 4);
    }
  }
}

TEST_CASE("two crossing axes: plateau plan passes") {
  RegularizedField rf(field(2, {1, 2}, {{"1", "y"}, {"-1", "x"}, {"x*y", "-1"}, {"2", "1 - x"}}), Mollifier::plateau(0.25));
  auto report = smoothness_report(rf, smoothing_plan(rf.base().locus()), quick());
  CHECK(report.charts.size() == 13);
  CHECK(report.pass());
}

TEST_CASE("without blow-up the regularized family is not smooth") {
  RegularizedField rf(field(2, {1}, {{"-1", "0"}, {"1", "0"}}), Mollifier::box());
  PlanChart id{ChartMap::identity(2), {}, {}, {1}};
  auto r = smoothness_report(rf, id, quick());
  CHECK_FALSE(r.pass());
  CHECK_THROWS_AS(verify_smooth(rf, id, quick()), Error);
  try {
    verify_smooth(rf, id, quick());
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotSmooth);
  }
}

TEST_CASE("branch truncation notices a wrongly dropped branch") {
  RegularizedField rf(field(2, {1}, {{"-1", "y"}, {"1", "x"}}), Mollifier::box());
  auto plan = smoothing_plan(rf.base().locus());
  for (auto pc : plan.atlas) {
    if (pc.dropped.empty()) continue;
    pc.dropped[0].second = -pc.dropped[0].second;
    auto r = smoothness_report(rf, pc, quick());
    CHECK_FALSE(r.pass());
  }
}

TEST_CASE("quadrature agreement is opt-in") {
  RegularizedField rf(field(2, {1}, {{"-1 + y^2", "x - y"}, {"1 + x*y", "2"}}), Mollifier::plateau(0.3));
  auto plan = smoothing_plan(rf.base().locus());
  auto o = quick();
  o.quadrature_samples = 3;
  auto r = smoothness_report(rf, plan.atlas[1], o);
  REQUIRE(r.checks.size() == 5);
  CHECK(r.checks[3].name == "route_agreement");
  CHECK(r.checks[3].samples == 3);
  CHECK(r.pass());
}

TEST_CASE("chart overlaps differ by the divisor quotient") {
  RegularizedField rf(field(2, {1, 2}, {{"1", "y"}, {"-1", "x"}, {"x*y", "-1"}, {"2", "1 - x"}}), Mollifier::box());
  auto ov = chart_overlap(rf, smoothing_plan(rf.base().locus()), 200, 7);
  CHECK(ov.pairs > 0);
  CHECK(ov.pass);
}

TEST_CASE("report json") {
  RegularizedField rf(field(2, {1}, {{"-1", "y"}, {"1", "x"}}), Mollifier::box());
  auto plan = smoothing_plan(rf.base().locus());
  auto j = smoothness_report(rf, plan, quick()).to_json();
  CHECK(j["charts"].size() == 3);
  CHECK(j["charts"][0].contains("chart_id"));
  CHECK(j["charts"][0]["checks"][0].contains("estimated_order"));
}
