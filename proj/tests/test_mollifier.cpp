#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "crossreg/error.hpp"
#include "crossreg/mollifier.hpp"

using namespace crossreg;

namespace {

// Independent oracle: Gauss-Kronrod on each smooth piece of the profile.
double gk(const Mollifier& m, int j, double lo, double hi) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  std::vector<double> pts = {lo};
  for (double b : m.breakpoints()) {
    if (b > lo && b < hi) pts.push_back(b);
  }
  pts.push_back(hi);
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    s += GK::integrate([&](double t) { return std::pow(t, j) * m.profile(t); }, pts[k], pts[k + 1], 8, 1e-13);
  }
  return s;
}

}  // namespace

TEST_CASE("box weights") {
  auto m = Mollifier::box();
  auto w = weight_functions(m, 0.0);
  CHECK(w.plus == 0.5);
  CHECK(w.minus == 0.5);
  CHECK(w.phi == 0.0);
  w = weight_functions(m, 1.0);
  CHECK(w.plus == 1.0);
  CHECK(w.minus == 0.0);
  CHECK(w.phi == 1.0);
  w = weight_functions(m, 0.5);
  CHECK(w.plus == doctest::Approx(0.75));
  CHECK(w.minus == doctest::Approx(0.25));
  CHECK(w.phi == doctest::Approx(0.5));
  CHECK(weight_functions(m, -3.0).plus == 0.0);
  CHECK(m.moment(0, -1, 1) == 1.0);
  CHECK(m.moment(1, -1, 1) == 0.0);
}

TEST_CASE("plateau profile") {
  for (double eta : {0.05, 0.2, 0.5}) {
    auto m = Mollifier::plateau(eta);
    CHECK(std::abs(gk(m, 0, -1, 1) - 1.0) < 1e-10);
    CHECK(std::abs(m.moment(0, -1, 1) - 1.0) < 1e-12);
    for (double t = -1.2; t <= 1.2; t += 0.013) CHECK(m.profile(t) == m.profile(-t));
    CHECK(m.profile(0.0) == m.profile(1.0 - eta));
    CHECK(m.profile(1.0) == 0.0);
    CHECK(m.profile(1.0 - 0.5 * eta) > 0.0);
    for (int j = 0; j <= 4; ++j) {
      for (double y : {-0.97, -0.6, 0.0, 0.3, 0.91, 0.99}) {
        CHECK(std::abs(m.moment(j, -1.0, y) - gk(m, j, -1.0, y)) < 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(Mollifier::plateau(0.0), Error);
  CHECK_THROWS_AS(Mollifier::plateau(1.0), Error);
}

TEST_CASE("batched moments match single moments") {
  for (double eta : {0.0, 0.1, 0.6}) {
    auto m = eta == 0.0 ? Mollifier::box() : Mollifier::plateau(eta);
    const double pts[] = {-1.3, -0.95, -0.7, -0.1, 0.0, 0.42, 0.88, 0.999, 1.2};
    for (double lo : pts) {
      for (double hi : pts) {
        std::vector<double> out(19);
        m.moments(18, lo, hi, out);
        for (int j = 0; j <= 18; ++j) CHECK(std::abs(out[static_cast<std::size_t>(j)] - m.moment(j, lo, hi)) < 1e-14);
      }
    }
  }
}

TEST_CASE("weight function properties") {
  for (auto m : {Mollifier::box(), Mollifier::plateau(0.3)}) {
    CHECK(weight_functions(m, -1.0).plus == 0.0);
    CHECK(weight_functions(m, 1.0).plus == doctest::Approx(1.0).epsilon(1e-12));
    double prev = -1.0;
    for (double y = -1.1; y <= 1.1; y += 0.01) {
      auto w = weight_functions(m, y);
      CHECK(w.plus >= prev - 1e-15);
      prev = w.plus;
      CHECK(w.plus + w.minus == doctest::Approx(1.0));
      CHECK(w.phi == doctest::Approx(-weight_functions(m, -y).phi).epsilon(1e-12));
    }
  }
}

TEST_CASE("mollifier json") {
  CHECK(Mollifier::from_json(nlohmann::json::parse(R"({"kind":"box"})")) == Mollifier::box());
  CHECK(Mollifier::from_json(nlohmann::json::parse(R"({"kind":"plateau","eta":0.1})")).eta() == 0.1);
  CHECK_THROWS_AS(Mollifier::from_json(nlohmann::json::parse(R"({"kind":"box","eta":0.1})")), Error);
  CHECK_THROWS_AS(Mollifier::from_json(nlohmann::json::parse(R"({"kind":"gauss"})")), Error);
  CHECK(Mollifier::from_json(Mollifier::plateau(0.25).to_json()) == Mollifier::plateau(0.25));
}
