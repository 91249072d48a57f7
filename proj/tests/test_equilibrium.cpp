#include <doctest.h>

#include <random>

#include "crossreg/equilibrium.hpp"
#include "crossreg/error.hpp"

using namespace crossreg;

namespace {

const std::vector<std::string> kXY = {"x", "y"};
const std::vector<std::string> kXYZ = {"x", "y", "z"};

AffineChange cusp_change() {
  // (X, Y, Z) = (x, x - z, x - y)
  AffineChange c;
  c.names = {"X", "Y", "Z"};
  c.A = {{1, 0, 0}, {1, 0, -1}, {1, -1, 0}};
  c.b = {0, 0, 0};
  return c;
}

}  // namespace

TEST_CASE("linear saddle") {
  VectorPoly f = {parse_poly("x", kXY), parse_poly("-y", kXY)};
  std::vector<double> o = {0.0, 0.0};
  auto info = classify_equilibrium(f, o);
  CHECK(info.kind == EquilibriumKind::Saddle);
  CHECK(info.determinant == -1.0);
  VectorPoly rot = {parse_poly("-y", kXY), parse_poly("x", kXY)};
  CHECK(classify_equilibrium(rot, o).kind == EquilibriumKind::CenterCandidate);
  VectorPoly sink = {parse_poly("-x", kXY), parse_poly("-2*y", kXY)};
  CHECK(classify_equilibrium(sink, o).kind == EquilibriumKind::Node);
  VectorPoly fold = {parse_poly("y", kXY), parse_poly("x^2", kXY)};
  CHECK(classify_equilibrium(fold, o).kind == EquilibriumKind::Degenerate);
}

TEST_CASE("planar cross equilibria") {
  auto f = planar_cross_field(2, Rational(1, 20), Rational(1, 20));
  std::vector<double> ul = {-0.45, 0.45}, lr = {0.45, -0.45};
  auto p = locate_equilibrium(f, ul);
  auto q = locate_equilibrium(f, lr);
  CHECK(p[0] == doctest::Approx(-0.4486466686424179).epsilon(1e-12));
  CHECK(q[1] == doctest::Approx(-0.4486466686424179).epsilon(1e-12));
  auto a = classify_equilibrium(f, p);
  auto b = classify_equilibrium(f, q);
  CHECK(a.kind == EquilibriumKind::Saddle);
  CHECK(b.kind == EquilibriumKind::Focus);

  SUBCASE("trace and determinant are the stated polynomials") {
    for (int C : {1, 2, 5}) {
      auto g = planar_cross_field(C, Rational(1, 7), Rational(3, 11));
      auto J = jacobian(g);
      auto Cs = std::to_string(C);
      CHECK(J[0][0] + J[1][1] == parse_poly(Cs + "*x - " + Cs + "/2 + y + 1/2", kXY));
      CHECK(J[0][0] * J[1][1] - J[0][1] * J[1][0] == parse_poly(Cs + "*(x - y)", kXY));
    }
  }

  SUBCASE("labels survive positive time rescaling") {
    VectorPoly g = f;
    for (auto& c : g) c *= Rational(7, 3);
    CHECK(classify_equilibrium(g, p).kind == a.kind);
    CHECK(classify_equilibrium(g, q).kind == b.kind);
  }
}

TEST_CASE("darboux first integral") {
  CHECK(darboux_H(0.0, 0.0, 0.1) == doctest::Approx(-0.35).epsilon(1e-15));
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    double x = u(rng), y = u(rng);
    CHECK(darboux_H(-y, -x, 0.1) == darboux_H(x, y, 0.1));
  }
  auto f = planar_cross_field(1, Rational(1, 10), Rational(1, 10));
  std::vector<CompiledPoly> c = {CompiledPoly(f[0]), CompiledPoly(f[1])};
  VecField X = [&](std::span<const double> x, std::span<double> dx) {
    dx[0] = c[0](x);
    dx[1] = c[1](x);
  };
  OdeOptions o;
  o.rtol = 1e-10;
  std::vector<double> x0 = {0.0, 0.0};
  CHECK(first_integral_drift(integrate(X, x0, 0.0, 10.0, o), 0.1) < 1e-8);
}

TEST_CASE("jet transform") {
  auto Y = spatial_cross_field();
  const std::vector<std::string> xyz = {"X", "Y", "Z"};
  SUBCASE("spatial cusp") {
    auto out = jet_transform(Y, cusp_change(), 2);
    CHECK(out[0] == parse_poly("Y", xyz));
    CHECK(out[1] == parse_poly("Z", xyz));
    CHECK(out[2] == parse_poly("X*(X - Z)", xyz));
    CHECK(jet_transform(Y, cusp_change()) == out);
  }
  SUBCASE("identity change") { CHECK(jet_transform(Y, AffineChange::identity(kXYZ)) == Y); }
  SUBCASE("inverse change recovers the field") {
    auto there = jet_transform(Y, cusp_change());
    auto back = jet_transform(there, cusp_change().inverse(kXYZ));
    CHECK(back == Y);
  }
  SUBCASE("parameters are carried") {
    const std::vector<std::string> v = {"x", "y", "z", "a", "b", "c"};
    VectorPoly U = {parse_poly("x - z", v), parse_poly("x - z - x*y - a - b*(x - z) - c*(x - y)", v), parse_poly("y - z", v)};
    auto out = jet_transform(U, cusp_change(), 2);
    const std::vector<std::string> w = {"X", "Y", "Z", "a", "b", "c"};
    CHECK(out[2] == parse_poly("a + b*Y + c*Z + X*(X - Z)", w));
  }
  SUBCASE("truncation") {
    VectorPoly cubic = {parse_poly("x^3 + y", kXY), parse_poly("x*y", kXY)};
    auto id = AffineChange::identity(kXY);
    auto t = jet_transform(cubic, id, 1);
    CHECK(t[0] == parse_poly("y", kXY));
    CHECK(t[1].is_zero());
  }
  SUBCASE("singular change") {
    auto c = cusp_change();
    c.A[2] = {1, 0, -1};
    try {
      jet_transform(Y, c);
      FAIL("expected SingularChange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::SingularChange);
    }
  }
}
