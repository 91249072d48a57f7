#include <doctest.h>

#include <random>

#include "crossreg/error.hpp"
#include "crossreg/regularization.hpp"

using namespace crossreg;

namespace {

const std::vector<std::string> kXY = {"x", "y"};
const std::vector<std::string> kXYE = {"x", "y", "eps"};

PiecewiseField across_x(const std::string& p1, const std::string& p2, const std::string& m1, const std::string& m2) {
  return PiecewiseField(NormalCrossingsLocus(2, {1}), kXY,
                        {{parse_poly(p1, kXY), parse_poly(p2, kXY)}, {parse_poly(m1, kXY), parse_poly(m2, kXY)}});
}

PiecewiseField random_field(std::mt19937& rng, std::vector<int> I) {
  std::uniform_int_distribution<int> coef(-5, 5);
  NormalCrossingsLocus locus(2, I);
  std::vector<VectorPoly> branches;
  for (std::size_t b = 0; b < (std::size_t{1} << locus.size()); ++b) {
    VectorPoly comps;
    for (int c = 0; c < 2; ++c) {
      MultiPoly p(kXY);
      for (int i = 0; i <= 2; ++i) {
        for (int j = 0; i + j <= 2; ++j) p += MultiPoly::monomial(kXY, {i, j}, Rational(coef(rng), 3));
      }
      comps.push_back(p);
    }
    branches.push_back(comps);
  }
  return PiecewiseField(locus, kXY, branches);
}

}  // namespace

TEST_CASE("sewing field at the origin") {
  RegularizedField rf(across_x("1", "1", "2", "1"), Mollifier::box());
  std::vector<double> x = {0.0, 0.0};
  auto v = rf.evaluate(x, 0.1);
  CHECK(v[0] == doctest::Approx(1.5));
  CHECK(v[1] == doctest::Approx(1.0));
  auto q = convolve_numeric(rf, x, 0.1);
  CHECK(std::abs(q[0] - (1.0 + weight_functions(Mollifier::box(), 0.0).minus)) < 1e-12);
  CHECK(std::abs(q[1] - 1.0) < 1e-12);
}

TEST_CASE("escaping field inside the band") {
  RegularizedField rf(across_x("1", "1", "-1", "1"), Mollifier::box());
  const double eps = 0.05;
  std::vector<double> x = {0.25 * eps, 0.0};
  auto q = convolve_numeric(rf, x, eps);
  CHECK(std::abs(q[0] - 0.25) < 1e-10);
  CHECK(std::abs(q[1] - 1.0) < 1e-10);
  // Brute-force midpoint sum as an independent oracle.
  const int N = 20000;
  double s = 0.0;
  for (int k = 0; k < N; ++k) {
    double t = -1.0 + (k + 0.5) * 2.0 / N;
    s += (x[0] - eps * t > 0 ? 1.0 : -1.0) * 0.5 * 2.0 / N;
  }
  CHECK(std::abs(q[0] - s) < 1e-6);
}

TEST_CASE("off-locus balls reproduce constant branches") {
  RegularizedField rf(across_x("3", "-1", "7", "2"), Mollifier::plateau(0.2));
  std::vector<double> x = {0.3, 0.5};
  auto v = convolve_numeric(rf, x, 0.2);
  CHECK(std::abs(v[0] - 3.0) < 1e-10);
  CHECK(std::abs(v[1] + 1.0) < 1e-10);
  CHECK(rf.evaluate(x, 0.0) == std::vector<double>{3.0, -1.0});
  CHECK_THROWS_AS(convolve_numeric(rf, std::vector<double>{0.0, 1.0}, 0.0), Error);
}

TEST_CASE("moment and quadrature routes agree") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto m : {Mollifier::box(), Mollifier::plateau(0.3)}) {
    for (auto I : {std::vector<int>{1}, std::vector<int>{1, 2}}) {
      RegularizedField rf(random_field(rng, I), m);
      for (int k = 0; k < 20; ++k) {
        std::vector<double> x = {u(rng), u(rng)};
        double eps = 0.5 * (u(rng) + 1.0) + 0.01;
        auto a = rf.evaluate(x, eps);
        auto b = convolve_numeric(rf, x, eps);
        CHECK(std::abs(a[0] - b[0]) < 1e-10);
        CHECK(std::abs(a[1] - b[1]) < 1e-10);
      }
    }
  }
}

TEST_CASE("chart evaluation matches direct evaluation off the divisor") {
  std::mt19937 rng(9);
  RegularizedField rf(random_field(rng, {1, 2}), Mollifier::plateau(0.25));
  auto plan = smoothing_plan(rf.base().locus());
  std::uniform_real_distribution<double> u(0.05, 0.9);
  for (const auto& pc : plan.atlas) {
    std::vector<double> w(3);
    for (std::size_t j = 0; j < 3; ++j) w[j] = pc.chart.nonneg()[j] ? u(rng) : u(rng) - 0.5;
    auto p = pc.chart.map(w);
    auto a = rf.evaluate_in_chart(pc.chart, w);
    auto b = rf.evaluate(std::span<const double>(p).first(2), p[2]);
    CHECK(std::abs(a[0] - b[0]) < 1e-12);
    CHECK(std::abs(a[1] - b[1]) < 1e-12);
  }
}

TEST_CASE("linearity") {
  std::mt19937 rng(13);
  auto f = random_field(rng, {1, 2});
  auto g = random_field(rng, {1, 2});
  const Rational alpha(3, 7), beta(-2, 5);
  std::vector<VectorPoly> mix;
  for (std::size_t b = 0; b < f.branch_count(); ++b) {
    mix.push_back({alpha * f.branch(b)[0] + beta * g.branch(b)[0], alpha * f.branch(b)[1] + beta * g.branch(b)[1]});
  }
  PiecewiseField h(f.locus(), kXY, mix);
  auto m = Mollifier::plateau(0.1);
  std::vector<double> x = {0.02, -0.01};
  auto rf = convolve_numeric(CallableField::from(f), m, x, 0.05);
  auto rg = convolve_numeric(CallableField::from(g), m, x, 0.05);
  auto rh = convolve_numeric(CallableField::from(h), m, x, 0.05);
  for (int c = 0; c < 2; ++c) CHECK(std::abs(rh[c] - (alpha.get_d() * rf[c] + beta.get_d() * rg[c])) < 1e-10);
}

TEST_CASE("box_moment") {
  const std::vector<std::string> v = {"y"};
  auto one = MultiPoly::constant(v, 1), m1 = MultiPoly::constant(v, -1), y = MultiPoly::variable(v, 0);
  CHECK(box_moment(0, m1, one) == one);
  CHECK(box_moment(1, m1, one).is_zero());
  CHECK(box_moment(0, m1, y) == parse_poly("(1 + y)/2", v));
}

TEST_CASE("symbolic convolution") {
  SUBCASE("sewing") {
    auto f = across_x("1", "1", "2", "1");
    auto chart = ChartMap::family(2, {1});
    auto core = convolve_symbolic(f, chart, Mollifier::box());
    CHECK(core.components[0] == parse_poly("(3 - x)/2", kXYE));
    CHECK(core.components[1] == parse_poly("1", kXYE));
    auto F = core.components;
    F.push_back(MultiPoly(kXYE));
    auto X = chart.divided_symbolic(F);
    CHECK(X[0] == parse_poly("(3 - x)/2", kXYE));
    CHECK(X[1] == parse_poly("eps", kXYE));
    CHECK(X[2].is_zero());
  }
  SUBCASE("escaping") {
    auto f = across_x("1", "1", "-1", "1");
    auto chart = ChartMap::family(2, {1});
    auto F = convolve_symbolic(f, chart, Mollifier::box()).components;
    F.push_back(MultiPoly(kXYE));
    auto X = chart.divided_symbolic(F);
    CHECK(X[0] == parse_poly("x", kXYE));
    CHECK(X[1] == parse_poly("eps", kXYE));
  }
  SUBCASE("planar weights") {
    NormalCrossingsLocus locus(2, {1, 2});
    auto chart = ChartMap::family(2, {1, 2});
    for (std::size_t idx = 0; idx < 4; ++idx) {
      std::vector<VectorPoly> branches(4, {MultiPoly::constant(kXY, 0), MultiPoly::constant(kXY, 0)});
      branches[idx][0] = MultiPoly::constant(kXY, 1);
      auto core = convolve_symbolic(PiecewiseField(locus, kXY, branches), chart, Mollifier::box());
      int s = idx & 1u ? -1 : 1, t = idx & 2u ? -1 : 1;
      auto expect = Rational(1, 4) * parse_poly("1 + " + std::to_string(s) + "*x", kXYE) *
                    parse_poly("1 + " + std::to_string(t) + "*y", kXYE);
      CHECK(core.components[0] == expect);
    }
  }
  SUBCASE("plateau is rejected") {
    auto f = across_x("1", "1", "2", "1");
    try {
      convolve_symbolic(f, ChartMap::family(2, {1}), Mollifier::plateau(0.1));
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnsupportedMollifier);
    }
  }
  SUBCASE("agrees with quadrature on the core region") {
    std::mt19937 rng(21);
    auto f = random_field(rng, {1, 2});
    auto chart = ChartMap::family(2, {1, 2});
    auto core = convolve_symbolic(f, chart, Mollifier::box());
    RegularizedField rf(f, Mollifier::box());
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        std::vector<double> w = {-0.9 + 0.2 * i, -0.9 + 0.2 * j, 0.3};
        auto p = chart.map(w);
        auto q = convolve_numeric(rf, std::span<const double>(p).first(2), p[2]);
        for (int c = 0; c < 2; ++c) CHECK(std::abs(core.components[c].evaluate(w) - q[c]) < 1e-10);
      }
    }
  }
}

TEST_CASE("ST regularization") {
  auto Xp = VectorPoly{parse_poly("1", kXY), parse_poly("1", kXY)};
  auto Xm = VectorPoly{parse_poly("2", kXY), parse_poly("1", kXY)};
  std::vector<double> x = {0.0, 0.3};
  auto v = st_regularize(Xp, Xm, Mollifier::box(), x, 0.1);
  CHECK(v[0] == doctest::Approx(1.5));
  x[0] = 0.1;
  v = st_regularize(Xp, Xm, Mollifier::box(), x, 0.1);
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 1.0);
}
