#include <doctest.h>

#include <random>

#include "crossreg/error.hpp"
#include "crossreg/piecewise.hpp"

using namespace crossreg;

namespace {

const std::vector<std::string> kXY = {"x", "y"};

PiecewiseField two_branch(const std::string& p1, const std::string& p2, const std::string& m1, const std::string& m2) {
  NormalCrossingsLocus locus(2, {1});
  return PiecewiseField(locus, kXY,
                        {{parse_poly(p1, kXY), parse_poly(p2, kXY)}, {parse_poly(m1, kXY), parse_poly(m2, kXY)}});
}

// Field whose branch b has constant components (b, b + 100) so branches are distinguishable.
PiecewiseField labelled(int n, std::vector<int> I) {
  std::vector<std::string> vars;
  for (int i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));
  NormalCrossingsLocus locus(n, I);
  std::vector<VectorPoly> branches;
  for (std::size_t b = 0; b < (std::size_t{1} << locus.size()); ++b) {
    VectorPoly comps;
    for (int c = 0; c < n; ++c) comps.push_back(MultiPoly::constant(vars, Rational(static_cast<long>(b) + 100 * c)));
    branches.push_back(comps);
  }
  return PiecewiseField(locus, vars, branches);
}

}  // namespace

TEST_CASE("eval_piecewise selects the orthant branch") {
  auto escaping = two_branch("1", "1", "-1", "1");
  std::vector<double> x = {0.5, 3.0};
  auto v = eval_piecewise(escaping, x);
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 1.0);
  x[0] = -0.5;
  CHECK(eval_piecewise(escaping, x)[0] == -1.0);
  x[0] = 0.0;
  CHECK_THROWS_AS(eval_piecewise(escaping, x), Error);
  try {
    eval_piecewise(escaping, x);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OnLocus);
  }
}

TEST_CASE("identical branches give a continuous field") {
  auto f = two_branch("2", "-3", "2", "-3");
  for (double x : {-2.0, -1e-9, 1e-9, 4.0}) {
    std::vector<double> p = {x, 0.7};
    CHECK(eval_piecewise(f, p) == std::vector<double>{2.0, -3.0});
  }
}

TEST_CASE("branch lookup by sign vector") {
  NormalCrossingsLocus locus(2, {1, 2});
  std::map<SignVector, VectorPoly> m;
  for (int s : {1, -1}) {
    for (int t : {1, -1}) {
      m[SignVector({{1, s}, {2, t}})] = {MultiPoly::constant(kXY, s * 3 + t), MultiPoly::constant(kXY, s - 5 * t)};
    }
  }
  auto f = PiecewiseField::from_map(locus, kXY, m);
  std::vector<double> x = {0.1, -0.1};
  auto v = eval_piecewise(f, x);
  CHECK(v[0] == 3 - 1);
  CHECK(v[1] == 1 + 5);
}

TEST_CASE("orthant constancy") {
  auto f = labelled(3, {1, 3});
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (int k = 0; k < 100; ++k) {
    std::vector<double> a = {u(rng), u(rng) - 1, -u(rng)};
    std::vector<double> b = {u(rng), a[1], -u(rng)};
    CHECK(eval_piecewise(f, a) == eval_piecewise(f, b));
  }
}

TEST_CASE("drop_component") {
  SUBCASE("keeps the requested side") {
    auto f = labelled(2, {1, 2});
    auto g = drop_component(f, 1, 1);
    CHECK(g.locus().active() == std::vector<int>{2});
    CHECK(g.branch_count() == 2);
    CHECK(g.branch(SignVector(std::map<int, int>{{2, 1}})) == f.branch(SignVector({{1, 1}, {2, 1}})));
    CHECK(g.branch(SignVector(std::map<int, int>{{2, -1}})) == f.branch(SignVector({{1, 1}, {2, -1}})));
  }
  SUBCASE("single axis leaves a smooth field") {
    auto f = two_branch("x", "y", "2*x", "y");
    auto g = drop_component(f, 1, -1);
    CHECK(g.locus().empty());
    CHECK(g.branch(0)[0] == parse_poly("2*x", kXY));
  }
  SUBCASE("bad axis") {
    auto f = labelled(3, {1, 2});
    CHECK_THROWS_AS(drop_component(f, 3, 1), Error);
  }
  SUBCASE("drops commute") {
    for (int n = 1; n <= 3; ++n) {
      std::vector<int> I;
      for (int i = 1; i <= n; ++i) I.push_back(i);
      auto f = labelled(n, I);
      for (int a : I) {
        for (int b : I) {
          if (a == b) continue;
          for (int sa : {1, -1}) {
            for (int sb : {1, -1}) {
              auto ab = drop_component(drop_component(f, a, sa), b, sb);
              auto ba = drop_component(drop_component(f, b, sb), a, sa);
              CHECK(ab.branches() == ba.branches());
              CHECK(ab.locus() == ba.locus());
            }
          }
        }
      }
      // Dropping everything with fixed signs leaves the branch with those signs.
      auto g = f;
      std::map<int, int> signs;
      for (int a : I) {
        int s = a % 2 ? -1 : 1;
        signs[a] = s;
        g = drop_component(g, a, s);
      }
      CHECK(g.branch_count() == 1);
      CHECK(g.branch(0) == f.branch(SignVector(signs)));
    }
  }
  SUBCASE("callable fields drop the same branches") {
    auto f = labelled(3, {1, 2, 3});
    auto cf = CallableField::from(f).drop_component(2, -1);
    auto g = drop_component(f, 2, -1);
    std::vector<double> x = {0.3, 0.5, -0.2}, out(3);
    cf.branches[cf.branch_at(x)](x, out);
    CHECK(out == eval_piecewise(g, x));
  }
}

TEST_CASE("json round trip") {
  auto f = two_branch("1/2*x - y^2", "3", "-7/3", "x*y");
  auto j = f.to_json();
  auto g = PiecewiseField::from_json(j);
  CHECK(g.branches() == f.branches());
  CHECK(g.locus() == f.locus());
  CHECK(j["branches"][0]["components"][0][0]["coef"].is_string());
  CHECK_THROWS_AS(PiecewiseField::from_json(nlohmann::json{{"n", 2}}), Error);
}
