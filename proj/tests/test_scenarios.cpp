#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include "crossreg/config.hpp"
#include "crossreg/error.hpp"
#include "crossreg/portrait.hpp"
#include "crossreg/scenarios.hpp"

using namespace crossreg;

namespace {

template <class F>
std::optional<ErrorCode> code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::size_t count(const std::string& s, const std::string& what) {
  std::size_t n = 0;
  for (auto p = s.find(what); p != std::string::npos; p = s.find(what, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("normal form table") {
  auto t = run_table();
  REQUIRE(t.rows.size() == 8);
  for (const auto& r : t.rows) {
    if (r.name == "hyperbolic fold") {
      // box convolution of y dx + dy against 2y dx - dy
      CHECK(r.computed[0] == parse_poly("(3*y - x*y)/2", {"x", "y", "eps"}));
      CHECK_FALSE(r.pass);
    } else {
      CHECK_MESSAGE(r.pass, r.name);
    }
  }
  CHECK(t.sewing.pass);
  CHECK(t.sewing_quadrature_error <= 1e-10);
}

TEST_CASE("lambda family structure") {
  for (const char* l : {"-2/5", "2/5", "-5/6"}) {
    for (const auto& c : lambda_structure(parse_rational(l))) CHECK_MESSAGE(c.pass, (c.name + ": " + c.detail));
  }
}

TEST_CASE("lambda poly-trajectory closes") {
  auto g = lambda_poly_trajectory(-0.4, 200);
  REQUIRE(g.size() > 4);
  CHECK(std::abs(g.front()[0] - g.back()[0]) < 1e-9);
  CHECK(std::abs(g.front()[1] - g.back()[1]) < 1e-9);
}

TEST_CASE("planar cross") {
  auto r = run_planar_cross({});
  CHECK(r.pass());
  int saddles = 0, foci = 0;
  for (const auto& e : r.equilibria) {
    saddles += e.kind == EquilibriumKind::Saddle;
    foci += e.kind == EquilibriumKind::Focus;
  }
  CHECK(saddles == 1);
  CHECK(foci == 1);
  CHECK(r.cusp.B == Rational(4, 9));
  CHECK(r.cusp.D == Rational(2, 9));
  CHECK(code_of([] {
          PlanarCrossOptions o;
          o.B = 0;
          run_planar_cross(o);
        }) == ErrorCode::DegenerateParameters);
}

TEST_CASE("bogdanov-takens coefficients") {
  for (int C : {2, 3, 5}) {
    auto bt = bogdanov_takens(Rational(C));
    CHECK(bt.a * bt.b < 0);
  }
  auto half = bogdanov_takens(Rational(1, 2));
  CHECK(half.a * half.b > 0);
  auto one = bogdanov_takens(Rational(1));
  CHECK(one.b == 0);
  CHECK(one.a != 0);
}

TEST_CASE("spatial cross") {
  auto r = run_spatial_cross(Rational(1, 3), Rational(-2), Rational(5, 7));
  CHECK(r.pass());
  CHECK(spatial_constants().size() == 8);
}

TEST_CASE("vertical divisor field") {
  for (auto m : {Mollifier::box(), Mollifier::plateau(0.3)}) {
    auto r = vertical_divisor_check(single_axis_example(), m);
    CHECK(r.samples == 21 * 25);
    CHECK(r.pass());
  }
  CHECK(code_of([] { vertical_divisor_check(smoothing_example(2), Mollifier::box()); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("ST link constant") {
  // branches are affine in x_1 with slopes b+, b-: the box gap is eps (b+ - b-)(1 - y^2) / 4,
  // largest for the first component, (2 - (-1)) / 4.
  auto r = st_link(single_axis_example(), Mollifier::box(), {0.1, 0.05, 0.025}, 21);
  REQUIRE(r.K.size() == 3);
  for (double k : r.K) CHECK(k == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(r.pass());
}

TEST_CASE("config parsing") {
  SUBCASE("decimals become short rationals") {
    CHECK(rational_from_json(nlohmann::json(0.05)) == Rational(1, 20));
    CHECK(rational_from_json(nlohmann::json("2/9")) == Rational(2, 9));
    CHECK(rational_from_json(nlohmann::json(3)) == Rational(3));
  }
  SUBCASE("planar cross parameters") {
    auto c = ScenarioConfig::from_json(nlohmann::json::parse(
        R"({"scenario": "planar_cross", "parameters": {"C": 1, "B": 0.1, "D": "1/10"}})"));
    CHECK(c.cross.C == Rational(1));
    CHECK(c.cross.B == Rational(1, 10));
    CHECK(c.cross.D == Rational(1, 10));
  }
  SUBCASE("unknown keys") {
    for (const char* doc : {R"({"scenario": "table", "extra": 1})",
                            R"({"scenario": "planar_cross", "parameters": {"E": 1}})",
                            R"({"scenario": "lambda_family", "tolerances": {"rtl": 1e-9}})",
                            R"({"scenario": "lambda_family", "portrait": {"boxx": [0, 1, 0, 1]}})",
                            R"({"scenario": "spatial_cross", "output": {"directory": "x"}})"}) {
      CHECK_MESSAGE(code_of([&] { ScenarioConfig::from_json(nlohmann::json::parse(doc)); }) == ErrorCode::ParseError,
                    doc);
    }
  }
  SUBCASE("bad values") {
    CHECK(code_of([] { ScenarioConfig::defaults("nope"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] {
            ScenarioConfig::from_json(nlohmann::json::parse(R"({"scenario": "planar_cross", "parameters": {"C": -1}})"));
          }) == ErrorCode::DegenerateParameters);
    CHECK(code_of([] {
            ScenarioConfig::from_json(nlohmann::json::parse(R"({"scenario": "lambda_family", "parameters": {"eta": 1}})"));
          }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { ScenarioConfig::from_json(nlohmann::json::parse(R"({"parameters": {}})")); }) ==
          ErrorCode::ParseError);
    CHECK(code_of([] { ScenarioConfig::load("/nonexistent/config.json"); }) == ErrorCode::IOFailure);
  }
}

TEST_CASE("scenario csv") {
  auto cfg = ScenarioConfig::defaults("spatial_cross");
  auto csv = scenario_csv(cfg, run_scenario(cfg));
  CHECK(csv.rfind("name,pass,detail\n", 0) == 0);
  CHECK(count(csv, "\n") == 1 + run_spatial_cross(0, 0, 0).checks.size());

  auto lc = ScenarioConfig::defaults("lambda_family");
  lc.lambda.lambdas = {0.4};
  lc.lambda.hausdorff = false;
  auto body = scenario_csv(lc, run_scenario(lc));
  CHECK(body.rfind("lambda,eps,found,amplitude,multiplier,period,hausdorff\n", 0) == 0);
  CHECK(count(body, "\n") == 2);
}

TEST_CASE("portrait clipping") {
  Box2 b{0, 1, 0, 1};
  Polyline p = {{-1.0, 0.5}, {0.5, 0.5}, {2.0, 0.5}, {2.0, 0.2}, {0.5, 0.2}};
  auto pieces = clip(p, b);
  REQUIRE(pieces.size() == 2);
  CHECK(pieces[0].front()[0] == doctest::Approx(0.0));
  CHECK(pieces[0].back()[0] == doctest::Approx(1.0));
  CHECK(pieces[1].front()[0] == doctest::Approx(1.0));
  CHECK(pieces[1].back()[0] == doctest::Approx(0.5));
}

TEST_CASE("level set of a circle") {
  auto lines = level_set([](double x, double y) { return x * x + y * y - 0.25; }, Box2{}, 100, 100);
  REQUIRE(lines.size() == 1);
  for (const auto& p : lines[0]) CHECK(std::hypot(p[0], p[1]) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("svg has one path per trajectory") {
  PortraitData d;
  d.box = Box2{};
  d.trajectories.push_back({{0.0, 0.0}, {0.5, 0.5}, {0.7, 0.2}});
  auto svg = render_svg(d);
  CHECK(count(svg, "<path") == 1);
  d.nullclines.push_back({{-1.0, 0.0}, {1.0, 0.0}});
  CHECK(count(render_svg(d), "<path") == 2);
  CHECK(code_of([&] { write_portrait(d, "png", "/tmp/x.png"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("planar cross portrait") {
  auto cfg = ScenarioConfig::defaults("planar_cross");
  auto d = scenario_portrait(cfg);
  int saddles = 0, foci = 0;
  for (const auto& m : d.equilibria) {
    saddles += m.label == "saddle";
    foci += m.label == "focus";
  }
  CHECK(saddles == 1);
  CHECK(foci == 1);
  CHECK(d.trajectories.size() == cfg.portrait.starts.size());
  auto svg = render_svg(d);
  CHECK(count(svg, "<path") == d.trajectories.size() + d.nullclines.size());
  CHECK(svg == render_svg(scenario_portrait(cfg)));
  CHECK(code_of([] { scenario_portrait(ScenarioConfig::defaults("table")); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("reports are deterministic") {
  for (const char* name : {"table", "planar_cross", "spatial_cross"}) {
    auto cfg = ScenarioConfig::defaults(name);
    CHECK(run_scenario(cfg).dump() == run_scenario(cfg).dump());
  }
}
