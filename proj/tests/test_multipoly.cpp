#include <doctest.h>

#include <random>

#include "crossreg/error.hpp"
#include "crossreg/multipoly.hpp"

using namespace crossreg;

namespace {

const std::vector<std::string> kXY = {"x", "y"};

MultiPoly random_poly(std::mt19937& rng, const std::vector<std::string>& vars, int max_deg, int nterms) {
  std::uniform_int_distribution<int> deg(0, max_deg);
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 5);
  MultiPoly p(vars);
  for (int k = 0; k < nterms; ++k) {
    Exponent e(vars.size());
    for (auto& v : e) v = deg(rng);
    p += MultiPoly::monomial(vars, e, Rational(num(rng), den(rng)));
  }
  return p;
}

}  // namespace

TEST_CASE("parse and print") {
  auto p = parse_poly("1/2*(3 - x) + y^2", kXY);
  CHECK(p.coefficient({0, 0}) == Rational(3, 2));
  CHECK(p.coefficient({1, 0}) == Rational(-1, 2));
  CHECK(p.coefficient({0, 2}) == 1);
  CHECK(parse_poly(p.to_string(), kXY) == p);
  CHECK(parse_rational("0.05") == Rational(1, 20));
  CHECK(parse_rational("-7/4") == Rational(-7, 4));
  CHECK_THROWS_AS(parse_poly("x + z", kXY), Error);
  CHECK_THROWS_AS(parse_poly("x / y", kXY), Error);
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
}

TEST_CASE("no zero coefficients are stored") {
  auto p = parse_poly("x - x + 0*y", kXY);
  CHECK(p.is_zero());
  CHECK(p.terms().empty());
  auto q = parse_poly("(x + y)*(x - y)", kXY);
  CHECK(q.terms().size() == 2);
}

TEST_CASE("ring round trips on random polynomials") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = random_poly(rng, kXY, 3, 5);
    auto q = random_poly(rng, kXY, 3, 5);
    CHECK((p + q) - q == p);
    CHECK(p * q == q * p);
    CHECK(p.substitute({MultiPoly::variable(kXY, 0), MultiPoly::variable(kXY, 1)}) == p);
    // d/dx of the integral from 0 to x recovers the integrand.
    auto lo = MultiPoly::constant(kXY, 0);
    auto hi = MultiPoly::variable(kXY, 0);
    CHECK(p.integrate(0, lo, hi).derivative(0) == p);
  }
}

TEST_CASE("definite integral with polynomial endpoints") {
  const std::vector<std::string> vars = {"t", "y"};
  auto half = MultiPoly::constant(vars, Rational(1, 2));
  auto r = half.integrate(0, MultiPoly::constant(vars, -1), MultiPoly::variable(vars, "y"));
  CHECK(r == parse_poly("(1 + y)/2", vars));
}

TEST_CASE("embed, truncate, evaluate") {
  auto p = parse_poly("x*y + 2*x^3", kXY);
  auto q = p.embed({"x", "z", "y"});
  CHECK(q.coefficient({1, 0, 1}) == 1);
  CHECK_THROWS_AS(p.embed({"x"}), Error);
  CHECK(p.truncate(2, {0, 1}) == parse_poly("x*y", kXY));
  CHECK(p.homogeneous_part(3, {0, 1}) == parse_poly("2*x^3", kXY));
  std::vector<double> pt = {0.5, -2.0};
  CHECK(p.evaluate(std::span<const double>(pt)) == doctest::Approx(-0.75));
  CompiledPoly c(p);
  CHECK(c(pt) == doctest::Approx(-0.75));
  std::vector<Rational> rp = {Rational(1, 2), Rational(-2)};
  CHECK(p.evaluate(std::span<const Rational>(rp)) == Rational(-3, 4));
}

TEST_CASE("leading zeros are decimal") {
  CHECK(parse_rational("0.40000000000000002") == Rational(mpz_class("20000000000000001"), mpz_class("50000000000000000")));
  CHECK(parse_rational("010/3") == Rational(10, 3));
  CHECK(parse_rational("0.05") == Rational(1, 20));
  CHECK(parse_rational("-0.5") == Rational(-1, 2));
}
