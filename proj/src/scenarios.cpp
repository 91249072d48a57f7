#include "crossreg/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "crossreg/chart.hpp"
#include "crossreg/error.hpp"

namespace crossreg {

namespace {

const std::vector<std::string> kXY = {"x", "y"};

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json polys_json(const VectorPoly& v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : v) out.push_back(p.to_string());
  return out;
}

bool all_zero(const VectorPoly& v) {
  return std::all_of(v.begin(), v.end(), [](const MultiPoly& p) { return p.is_zero(); });
}

PiecewiseField across_x(const std::array<std::string, 2>& plus, const std::array<std::string, 2>& minus) {
  VectorPoly p = {parse_poly(plus[0], kXY), parse_poly(plus[1], kXY)};
  VectorPoly m = {parse_poly(minus[0], kXY), parse_poly(minus[1], kXY)};
  return PiecewiseField(NormalCrossingsLocus(2, {1}), kXY, {p, m});
}

VectorPoly divided_family(const PiecewiseField& f, const ChartMap& chart) {
  auto F = convolve_symbolic(f, chart, Mollifier::box()).components;
  F.push_back(MultiPoly(chart_variables(f)));
  auto X = chart.divided_symbolic(F);
  X.pop_back();
  return X;
}

Rational eval_at(const MultiPoly& p, std::vector<Rational> point) { return p.evaluate(point); }

Polyline dense(const Trajectory& tr, std::size_t samples) {
  Polyline out;
  const double t0 = tr.t.front(), t1 = tr.t.back();
  for (std::size_t k = 0; k <= samples; ++k) {
    out.push_back(tr.interpolate(t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(samples)));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<TableRow>& normal_form_table() {
  static const std::vector<TableRow> rows = {
      {"escaping", {"1", "1"}, {"-1", "1"}, {"x", "eps"}},
      {"sliding", {"-1", "-1"}, {"1", "-1"}, {"-x", "-eps"}},
      {"saddle", {"x + 1", "-y"}, {"x - 1", "-y"}, {"x + eps*x", "-eps*y"}},
      {"fold-regular", {"y", "1"}, {"1", "1"}, {"(1 - x + y*(1 + x))/2", "eps"}},
      {"saddle-node", {"-1", "-y^2"}, {"1", "0"}, {"-x", "-eps*(1 + x)*(eps^2/6 + y^2/2)"}},
      {"elliptic fold", {"-y", "1"}, {"y", "1"}, {"-x*y", "eps"}},
      {"hyperbolic fold", {"y", "1"}, {"2*y", "-1"}, {"(y - 3*x*y)/2", "eps*x"}},
      {"parabolic fold", {"-y", "-1"}, {"2*y", "1"}, {"(y - 3*x*y)/2", "-eps*x"}},
  };
  return rows;
}

nlohmann::json RowResult::to_json() const {
  return {{"name", name},
          {"pass", pass},
          {"computed", polys_json(computed)},
          {"expected", polys_json(expected)},
          {"residual", polys_json(residual)}};
}

RowResult run_row(const TableRow& row) {
  auto f = across_x(row.plus, row.minus);
  auto vars = chart_variables(f);
  RowResult r;
  r.name = row.name;
  r.computed = divided_family(f, ChartMap::family(2, {1}));
  for (std::size_t c = 0; c < 2; ++c) {
    r.expected.push_back(parse_poly(row.expected[c], vars));
    r.residual.push_back(r.computed[c] - r.expected[c]);
  }
  r.pass = all_zero(r.residual);
  return r;
}

bool TableReport::pass() const {
  return sewing.pass && sewing_quadrature_error <= 1e-10 &&
         std::all_of(rows.begin(), rows.end(), [](const RowResult& r) { return r.pass; });
}

nlohmann::json TableReport::to_json() const {
  nlohmann::json rj = nlohmann::json::array();
  for (const auto& r : rows) rj.push_back(r.to_json());
  return {{"rows", rj}, {"sewing", sewing.to_json()}, {"sewing_quadrature_error", sewing_quadrature_error}, {"pass", pass()}};
}

TableReport run_table() {
  TableReport rep;
  for (const auto& row : normal_form_table()) rep.rows.push_back(run_row(row));
  TableRow sew{"sewing", {"1", "1"}, {"2", "1"}, {"(3 - x)/2", "eps"}};
  rep.sewing = run_row(sew);

  auto f = across_x(sew.plus, sew.minus);
  auto chart = ChartMap::family(2, {1});
  auto core = convolve_symbolic(f, chart, Mollifier::box());
  RegularizedField rf(f, Mollifier::box());
  QuadOptions q;
  q.abs_tol = 1e-13;
  for (int i = 0; i <= 8; ++i) {
    for (int j = 0; j <= 4; ++j) {
      for (double eps : {0.05, 0.3}) {
        std::vector<double> w = {-0.95 + 0.2375 * i, -1.0 + 0.5 * j, eps};
        auto p = chart.map(w);
        auto v = convolve_numeric(rf, std::span<const double>(p).first(2), p[2], q);
        for (std::size_t c = 0; c < 2; ++c) {
          rep.sewing_quadrature_error = std::max(rep.sewing_quadrature_error, std::abs(core.components[c].evaluate(w) - v[c]));
        }
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

PiecewiseField lambda_field(const Rational& lambda) {
  auto x = MultiPoly::variable(kXY, 0);
  auto one = MultiPoly::constant(kXY, 1);
  auto u = x + lambda * one;
  VectorPoly plus = {one, Rational(-3) * u * u + Rational(2) * u + Rational(7, 4) * one};
  VectorPoly minus = {Rational(-1) * one, parse_poly("3*x^2 - 7*x + 2", kXY)};
  return PiecewiseField(NormalCrossingsLocus(2, {2}), kXY, {plus, minus});
}

std::vector<SewingStep> lambda_sewing_plan() {
  return {{Section::coordinate(2, 2, 0.0, -1), 0}, {Section::coordinate(2, 2, 0.0, 1), 1}};
}

Polyline lambda_poly_trajectory(double lambda, std::size_t samples_per_arc) {
  if (!(lambda > -5.0 / 6.0 && lambda < 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "the fold-to-fold poly-trajectory exists for lambda in (-5/6, 0)");
  }
  // y along the upper arc is F+(x) - F+(x0) (x' = 1), along the lower arc F-(x1) - F-(x) (x' = -1)
  auto Fp = [lambda](double x) { double u = x + lambda; return -u * u * u + u * u + 1.75 * u; };
  auto Fm = [](double x) { return x * x * x - 3.5 * x * x + 2.0 * x; };
  const double a = -0.5 - lambda, b = 2.0 - lambda;
  Polyline out;
  const auto n = static_cast<double>(samples_per_arc);
  for (std::size_t k = 0; k <= samples_per_arc; ++k) {
    double x = a + (b - a) * static_cast<double>(k) / n;
    out.push_back({x, Fp(x) - Fp(a)});
  }
  out.back()[1] = 0.0;
  for (std::size_t k = 0; k <= samples_per_arc; ++k) {
    double x = 2.0 + (-0.5 - 2.0) * static_cast<double>(k) / n;
    out.push_back({x, Fm(2.0) - Fm(x)});
  }
  out.back()[1] = 0.0;
  out.push_back({a, 0.0});
  return out;
}

LambdaOptions::LambdaOptions() {
  transition.ode.rtol = 1e-11;
  transition.ode.atol = 1e-13;
  transition.t_max = 50.0;
}

nlohmann::json CycleEntry::to_json() const {
  nlohmann::json j = {{"lambda", lambda}, {"eps", eps},   {"found", found},   {"y", y},
                      {"amplitude", amplitude}, {"multiplier", multiplier}, {"period", period}, {"note", note}};
  j["hausdorff"] = hausdorff ? nlohmann::json(*hausdorff) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json BifurcationReport::to_json() const {
  nlohmann::json s = nlohmann::json::array(), c = nlohmann::json::array();
  for (const auto& k : structure) s.push_back(k.to_json());
  for (const auto& e : cycles) c.push_back(e.to_json());
  return {{"structure", s}, {"cycles", c}};
}

std::string BifurcationReport::to_csv() const {
  std::ostringstream os;
  os << "lambda,eps,found,amplitude,multiplier,period,hausdorff\n";
  for (const auto& e : cycles) {
    os << g17(e.lambda) << ',' << g17(e.eps) << ',' << (e.found ? 1 : 0) << ',' << g17(e.amplitude) << ','
       << g17(e.multiplier) << ',' << g17(e.period) << ',' << (e.hausdorff ? g17(*e.hausdorff) : "") << '\n';
  }
  return os.str();
}

std::vector<Check> lambda_structure(const Rational& lambda) {
  std::vector<Check> out;
  auto f = lambda_field(lambda);
  const MultiPoly& Pp = f.branch(0)[1];
  const MultiPoly& Pm = f.branch(1)[1];
  const Rational half(1, 2), third(1, 3);
  const Rational folds_p[2] = {-half - lambda, Rational(7, 6) - lambda};
  const Rational folds_m[2] = {third, Rational(2)};

  bool ok = true;
  std::string detail;
  for (const auto& x : folds_p) {
    ok = ok && eval_at(Pp, {x, 0}) == 0 && eval_at(Pp.derivative(0), {x, 0}) != 0;
    detail += "X+ fold at x=" + rational_to_string(x) + "; ";
  }
  for (const auto& x : folds_m) {
    ok = ok && eval_at(Pm, {x, 0}) == 0 && eval_at(Pm.derivative(0), {x, 0}) != 0;
    detail += "X- fold at x=" + rational_to_string(x) + "; ";
  }
  out.push_back({"fold_points", ok, detail});

  // sewing where both normal components share a sign, sliding or escaping otherwise
  if (lambda > Rational(-5, 6) && lambda < Rational(5, 6)) {
    std::vector<Rational> ends = {-half - lambda, third, Rational(7, 6) - lambda, Rational(2)};
    std::vector<Rational> probes = {ends[0] - 1};
    for (std::size_t k = 0; k + 1 < ends.size(); ++k) probes.push_back((ends[k] + ends[k + 1]) / 2);
    probes.push_back(ends[3] + 1);
    const bool expect_sewing[5] = {false, true, false, true, false};
    bool regions = true;
    for (std::size_t k = 0; k < probes.size(); ++k) {
      Rational prod = eval_at(Pp, {probes[k], 0}) * eval_at(Pm, {probes[k], 0});
      regions = regions && ((prod > 0) == expect_sewing[k]) && prod != 0;
    }
    out.push_back({"sliding_sewing_regions", regions,
                   "endpoints " + rational_to_string(ends[0]) + ", 1/3, " + rational_to_string(ends[2]) + ", 2"});
  }

  auto sym = lambda_field(Rational(-5, 6));
  bool mirror = true;
  for (std::size_t c = 0; c < 2; ++c) mirror = mirror && sym.branch(0)[c] == -sym.branch(1)[c];
  out.push_back({"symmetry_at_minus_5_6", mirror, "X+ = -X- at lambda = -5/6"});

  // eps-chart in y: the second divided component against the printed G
  auto chart = ChartMap::family(2, {2});
  auto X = divided_family(f, chart);
  auto vars = chart_variables(f);
  const Rational l = lambda, l2 = lambda * lambda;
  auto x = MultiPoly::variable(vars, 0), y = MultiPoly::variable(vars, 1);
  auto one = MultiPoly::constant(vars, 1);
  MultiPoly G = (Rational(15, 8) + l - Rational(3, 2) * l2) * one + (Rational(-5, 2) - 3 * l) * x +
                (Rational(-1, 8) + l - Rational(3, 2) * l2) * y + (Rational(9, 2) - 3 * l) * x * y - Rational(3) * x * x * y;
  MultiPoly at0 = X[1].substitute(2, MultiPoly(vars)) - G;
  MultiPoly eps_part = X[1] - X[1].substitute(2, MultiPoly(vars));
  out.push_back({"G_polynomial", at0.is_zero(),
                 "residual at eps=0: " + at0.to_string() + "; eps-dependent part: " + eps_part.to_string()});
  auto xcomp = MultiPoly::variable(vars, 2) * y;
  out.push_back({"horizontal_component", X[0] == xcomp, "eps*y: " + X[0].to_string()});
  return out;
}

CycleEntry lambda_cycle(double lambda, double eps, const LambdaOptions& opt) {
  CycleEntry e;
  e.lambda = lambda;
  e.eps = eps;
  auto field = lambda_field(Rational(lambda));
  auto orbit_from = [](const std::vector<const Trajectory*>& parts) {
    Polyline p;
    for (const auto* tr : parts) {
      auto d = dense(*tr, 2000);
      p.insert(p.end(), d.begin(), d.end());
    }
    return p;
  };
  auto extent = [](const Polyline& p) {
    double lo = p.front()[1], hi = lo;
    for (const auto& q : p) {
      lo = std::min(lo, q[1]);
      hi = std::max(hi, q[1]);
    }
    return hi - lo;
  };

  if (eps == 0.0) {
    const double left = -0.5 - lambda, right = 1.0 / 3.0;
    std::string last;
    for (double frac : {0.5, 0.25, 0.75}) {
      std::vector<double> seed = {left + frac * (right - left)};
      try {
        auto cyc = sewing_poincare(field, lambda_sewing_plan(), seed, opt.transition, opt.cycle);
        e.found = true;
        e.y = cyc.result.fixed_point[0];
        e.multiplier = cyc.result.multipliers[0].real();
        e.period = cyc.result.return_time;
        std::vector<const Trajectory*> parts;
        for (const auto& s : cyc.segments) parts.push_back(&s.path);
        e.orbit = orbit_from(parts);
        e.amplitude = extent(e.orbit);
        e.note = "sewing cycle; fixed point is x on {y = 0}";
        return e;
      } catch (const Error& err) {
        last = err.what();
      }
    }
    e.note = "no sewing cycle: " + last;
    return e;
  }

  RegularizedField rf(field, opt.eta == 0.0 ? Mollifier::box() : Mollifier::plateau(opt.eta));
  auto sec = Section::coordinate(2, 1, opt.section_x, 1);
  const double lo = opt.search_lo > 0.0 ? opt.search_lo : eps;
  std::string last = "no seed converged";
  for (double y0 : opt.seeds) {
    if (y0 < lo || y0 > opt.search_hi) continue;
    std::vector<double> seed = {-y0};  // section coordinate is -y
    try {
      auto r = regularized_poincare(rf, eps, sec, seed, opt.transition, opt.cycle);
      double y = -r.fixed_point[0];
      if (y < lo || y > opt.search_hi) {
        last = "fixed point y=" + g17(y) + " outside the search box";
        continue;
      }
      e.found = true;
      e.y = y;
      e.multiplier = r.multipliers[0].real();
      e.period = r.return_time;
      TransitionOptions t = opt.transition;
      t.derivative = false;
      auto tr = transition_map(regularized_vector_field(rf, eps), sec, r.fixed_point, sec, t);
      e.orbit = orbit_from({&tr.path});
      e.amplitude = extent(e.orbit);
      e.note = "cycle on x = " + g17(opt.section_x);
      break;
    } catch (const Error& err) {
      last = err.what();
    }
  }
  if (!e.found) {
    e.note = last;
    return e;
  }
  if (opt.hausdorff) {
    if (lambda > -5.0 / 6.0 && lambda < 0.0) {
      e.hausdorff = hausdorff(e.orbit, lambda_poly_trajectory(lambda));
    } else if (lambda > 0.0 && lambda < 5.0 / 6.0) {
      auto limit = lambda_cycle(lambda, 0.0, opt);
      if (limit.found) e.hausdorff = hausdorff(e.orbit, limit.orbit);
    }
  }
  return e;
}

BifurcationReport run_lambda_family(const LambdaOptions& opt) {
  BifurcationReport rep;
  std::vector<double> lams = opt.lambdas;
  std::vector<double> epss = opt.epsilons;
  std::sort(lams.begin(), lams.end());
  std::sort(epss.begin(), epss.end(), std::greater<>());
  for (double l : lams) {
    for (auto& c : lambda_structure(Rational(l))) {
      c.name = "lambda=" + g17(l) + " " + c.name;
      rep.structure.push_back(std::move(c));
    }
  }
  // independent grid points; the ordered collection keeps output stable
  std::vector<std::pair<double, double>> grid;
  for (double l : lams) {
    for (double e : epss) grid.emplace_back(l, e);
  }
  rep.cycles.resize(grid.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < grid.size(); ++k) rep.cycles[k] = lambda_cycle(grid[k].first, grid[k].second, opt);
  return rep;
}

// ---------------------------------------------------------------------------

nlohmann::json BTData::to_json() const {
  auto s = [](const Rational& q) { return rational_to_string(q); };
  return {{"C", s(C)},       {"x", s(x)}, {"y", s(x)}, {"B", s(B)}, {"D", s(D)}, {"D_printed", s(D_printed)},
          {"a", s(a)},       {"b", s(b)}, {"ab_sign", sgn(a * b)}};
}

BTData bogdanov_takens(const Rational& C) {
  if (C <= 0) throw Error(ErrorCode::DegenerateParameters, "the cusp stratum needs C > 0");
  BTData bt;
  bt.C = C;
  const Rational half(1, 2);
  bt.x = (C - 1) / (2 * (C + 1));
  bt.x.canonicalize();
  bt.B = (bt.x + half) * (bt.x + half);
  bt.D = C * (bt.x - half) * (bt.x - half);
  bt.D_printed = C / (C * C + 1);

  auto F = planar_cross_field(C, bt.B, bt.D);
  auto J = jacobian(F);
  std::vector<Rational> p = {bt.x, bt.x};
  Rational m[2][2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) m[i][j] = J[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].evaluate(p);
  }
  // nilpotent linear part: v0 spans the kernel, J v1 = v0
  Rational v0[2], v1[2];
  if (m[0][0] != 0) {
    v0[0] = -m[0][1] / m[0][0];
    v0[1] = 1;
  } else {
    v0[0] = 1;
    v0[1] = 0;
  }
  const int r = m[0][0] != 0 || m[0][1] != 0 ? 0 : 1;
  if (m[r][0] != 0) {
    v1[0] = v0[r] / m[r][0];
    v1[1] = 0;
  } else {
    v1[0] = 0;
    v1[1] = v0[r] / m[r][1];
  }
  // second derivatives of the bilinear components along the frame
  auto hess = [&](std::size_t comp, const Rational* a, const Rational* b) {
    Rational h = 0;
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) h += F[comp].derivative(i).derivative(j).evaluate(p) * a[i] * b[j];
    }
    return h;
  };
  Rational det = v0[0] * v1[1] - v1[0] * v0[1];
  Rational Ti[2][2] = {{v1[1] / det, -v1[0] / det}, {-v0[1] / det, v0[0] / det}};
  Rational Fuu[2] = {hess(0, v0, v0), hess(1, v0, v0)};
  Rational Fuw[2] = {hess(0, v0, v1), hess(1, v0, v1)};
  Rational a20 = Ti[0][0] * Fuu[0] + Ti[0][1] * Fuu[1];
  Rational b20 = Ti[1][0] * Fuu[0] + Ti[1][1] * Fuu[1];
  Rational b11 = Ti[1][0] * Fuw[0] + Ti[1][1] * Fuw[1];
  bt.a = b20 / 2;
  bt.b = a20 + b11;
  return bt;
}

bool CrossReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

nlohmann::json CrossReport::to_json() const {
  nlohmann::json consts = nlohmann::json::array();
  for (const auto& c : constants) consts.push_back({rational_to_string(c[0]), rational_to_string(c[1])});
  nlohmann::json ch = nlohmann::json::array(), eq = nlohmann::json::array();
  for (const auto& c : checks) ch.push_back(c.to_json());
  for (const auto& e : equilibria) eq.push_back(e.to_json());
  nlohmann::json j = {{"C", rational_to_string(params.C)},
                      {"B", rational_to_string(params.B)},
                      {"D", rational_to_string(params.D)},
                      {"quadrant_constants", consts},
                      {"checks", ch},
                      {"equilibria", eq},
                      {"cusp", cusp.to_json()},
                      {"pass", pass()}};
  j["first_integral_drift"] = drift ? nlohmann::json(*drift) : nlohmann::json(nullptr);
  return j;
}

CrossReport run_planar_cross(const PlanarCrossOptions& opt) {
  if (opt.C <= 0 || opt.B <= 0 || opt.D <= 0) {
    throw Error(ErrorCode::DegenerateParameters, "planar cross needs C, B, D > 0");
  }
  CrossReport rep;
  rep.params = opt;
  const auto F = planar_cross_field(opt.C, opt.B, opt.D);

  // quadrant constants: bilinear fields are fixed by their values at (+-1, +-1)
  std::vector<VectorPoly> branches;
  for (std::size_t idx = 0; idx < 4; ++idx) {
    Rational s = idx & 1u ? -1 : 1, t = idx & 2u ? -1 : 1;
    std::vector<Rational> corner = {s, t};
    rep.constants[idx] = {F[0].evaluate(corner), F[1].evaluate(corner)};
    branches.push_back({MultiPoly::constant(kXY, rep.constants[idx][0]), MultiPoly::constant(kXY, rep.constants[idx][1])});
  }
  PiecewiseField cross(NormalCrossingsLocus(2, {1, 2}), kXY, branches);
  auto chart = ChartMap::family(2, {1, 2});
  auto vars = chart_variables(cross);
  MultiPoly weights(vars);
  for (int s : {1, -1}) {
    for (int t : {1, -1}) {
      weights += Rational(1, 4) * parse_poly("(1 + " + std::to_string(s) + "*x)*(1 + " + std::to_string(t) + "*y)", vars);
    }
  }
  rep.checks.push_back({"weights_sum_to_one", weights == MultiPoly::constant(vars, 1), "sum of (1+sx)(1+ty)/4"});
  auto core = convolve_symbolic(cross, chart, Mollifier::box());
  bool same = core.components[0] == F[0].embed(vars) && core.components[1] == F[1].embed(vars);
  rep.checks.push_back({"core_is_normal_form", same, "core field of the constant cross equals (f, g)"});

  auto J = jacobian(F);
  auto Cs = rational_to_string(opt.C);
  bool trace = J[0][0] + J[1][1] == parse_poly(Cs + "*x - " + Cs + "/2 + y + 1/2", kXY);
  bool det = J[0][0] * J[1][1] - J[0][1] * J[1][0] == parse_poly(Cs + "*(x - y)", kXY);
  rep.checks.push_back({"trace_formula", trace, "Tr = Cx - C/2 + y + 1/2"});
  rep.checks.push_back({"determinant_formula", det, "Det = C(x - y)"});

  // f = 0 gives y = B/(x + 1/2) - 1/2; then -C x^2 + (CB - D) x + C(1/4 - B/2) - D/2 = 0
  const double C = opt.C.get_d(), B = opt.B.get_d(), D = opt.D.get_d();
  const double qa = -C, qb = C * B - D, qc = C * (0.25 - 0.5 * B) - 0.5 * D;
  const double disc = qb * qb - 4 * qa * qc;
  if (disc >= 0.0) {
    const double sq = std::sqrt(disc);
    for (double x : {(-qb + sq) / (2 * qa), (-qb - sq) / (2 * qa)}) {
      if (std::abs(x + 0.5) < 1e-14) continue;
      std::vector<double> guess = {x, B / (x + 0.5) - 0.5};
      auto p = locate_equilibrium(F, guess);
      rep.equilibria.push_back(classify_equilibrium(F, p));
    }
  }
  std::sort(rep.equilibria.begin(), rep.equilibria.end(),
            [](const EquilibriumInfo& a, const EquilibriumInfo& b) { return a.location < b.location; });
  std::string labels;
  bool split = rep.equilibria.size() == 2;
  for (const auto& e : rep.equilibria) {
    bool upper_left = e.location[0] < e.location[1];
    labels += std::string(upper_left ? "upper-left " : "lower-right ") + to_string(e.kind) + "; ";
    // Det = C(x - y): saddle above the diagonal, anti-saddle below
    split = split && (e.kind == EquilibriumKind::Saddle) == upper_left && e.kind != EquilibriumKind::Degenerate;
  }
  rep.checks.push_back({"isocline_equilibria", split, labels.empty() ? "no real isocline intersection" : labels});

  rep.cusp = bogdanov_takens(opt.C);
  const auto& bt = rep.cusp;
  rep.checks.push_back({"cusp_B", bt.B == opt.C * opt.C / ((opt.C + 1) * (opt.C + 1)), "B* = C^2/(C+1)^2 = " + rational_to_string(bt.B)});
  auto G = planar_cross_field(opt.C, bt.B, bt.D_printed);
  std::vector<Rational> cp = {bt.x, bt.x};
  Rational printed_residual = G[1].evaluate(cp);
  rep.checks.push_back({"cusp_D", bt.D == opt.C / ((opt.C + 1) * (opt.C + 1)),
                        "D* = C/(C+1)^2 = " + rational_to_string(bt.D) + "; printed C/(C^2+1) = " +
                            rational_to_string(bt.D_printed) + " leaves g = " + rational_to_string(printed_residual) +
                            " at the cusp point"});
  int ab = sgn(bt.a * bt.b);
  bool bt_ok = opt.C > 1 ? ab < 0 : (opt.C < 1 ? ab > 0 : bt.b == 0);
  rep.checks.push_back({"bogdanov_takens_sign", bt_ok,
                        "a = " + rational_to_string(bt.a) + ", b = " + rational_to_string(bt.b) +
                            " (the sign of a alone depends on the frame orientation)"});

  if (opt.C == 1 && opt.B == opt.D) {
    std::vector<CompiledPoly> c = {CompiledPoly(F[0]), CompiledPoly(F[1])};
    VecField X = [&](std::span<const double> x, std::span<double> dx) {
      dx[0] = c[0](x);
      dx[1] = c[1](x);
    };
    OdeOptions o;
    o.rtol = opt.drift_rtol;
    std::vector<double> x0 = {0.0, 0.0};
    rep.drift = first_integral_drift(integrate(X, x0, 0.0, opt.drift_time, o), opt.B.get_d());
    rep.checks.push_back({"first_integral_drift", *rep.drift < 1e-8, "max relative drift " + g17(*rep.drift)});
  }
  return rep;
}

// ---------------------------------------------------------------------------

std::vector<VectorPoly> spatial_constants() {
  const std::vector<std::string> abc = {"a", "b", "c"};
  std::vector<VectorPoly> out;
  for (unsigned idx = 0; idx < 8; ++idx) {
    const int s1 = idx & 1u ? -1 : 1, s2 = idx & 2u ? -1 : 1, s3 = idx & 4u ? -1 : 1;
    auto k = [&](int v) { return MultiPoly::constant(abc, v); };
    auto a = MultiPoly::variable(abc, 0), b = MultiPoly::variable(abc, 1), c = MultiPoly::variable(abc, 2);
    out.push_back({k(s1 - s3), k(s1 - s3 - s1 * s2) - a - k(s1 - s3) * b - k(s1 - s2) * c, k(s2 - s3)});
  }
  return out;
}

bool SpatialReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

nlohmann::json SpatialReport::to_json() const {
  nlohmann::json ch = nlohmann::json::array();
  for (const auto& c : checks) ch.push_back(c.to_json());
  return {{"a", rational_to_string(a)},
          {"b", rational_to_string(b)},
          {"c", rational_to_string(c)},
          {"checks", ch},
          {"core_times_8", polys_json(core)},
          {"jet", polys_json(jet)},
          {"pass", pass()}};
}

SpatialReport run_spatial_cross(const Rational& a, const Rational& b, const Rational& c) {
  SpatialReport rep;
  rep.a = a;
  rep.b = b;
  rep.c = c;
  const std::vector<std::string> ring = {"x", "y", "z", "a", "b", "c"};
  const std::vector<std::string> xyz = {"x", "y", "z"};
  const auto consts = spatial_constants();

  // brute force over the eight sign vectors, parameters kept symbolic
  MultiPoly wsum(ring);
  VectorPoly core(3, MultiPoly(ring));
  for (unsigned idx = 0; idx < 8; ++idx) {
    const int s[3] = {idx & 1u ? -1 : 1, idx & 2u ? -1 : 1, idx & 4u ? -1 : 1};
    MultiPoly P = MultiPoly::constant(ring, 1);
    for (std::size_t k = 0; k < 3; ++k) P *= MultiPoly::constant(ring, 1) + Rational(s[k]) * MultiPoly::variable(ring, k);
    wsum += Rational(1, 8) * P;
    for (std::size_t k = 0; k < 3; ++k) core[k] += P * consts[idx][k].embed(ring);
  }
  rep.checks.push_back({"weights_sum_to_one", wsum == MultiPoly::constant(ring, 1), "sum of P_s/8"});

  std::vector<MultiPoly> zero_params;
  for (std::size_t k = 0; k < 3; ++k) zero_params.push_back(MultiPoly::variable(xyz, k));
  for (int k = 0; k < 3; ++k) zero_params.push_back(MultiPoly(xyz));
  VectorPoly at0;
  for (const auto& p : core) at0.push_back(p.substitute(zero_params));
  rep.checks.push_back({"closed_form_at_zero", at0 == VectorPoly{Rational(8) * parse_poly("x - z", xyz),
                                                                 Rational(8) * parse_poly("x - z - x*y", xyz),
                                                                 Rational(8) * parse_poly("y - z", xyz)},
                        "sum_s P_s C_s = 8 (x - z, x - z - xy, y - z)"});

  AffineChange change;
  change.names = {"X", "Y", "Z"};
  change.A = {{1, 0, 0}, {1, 0, -1}, {1, -1, 0}};
  change.b = {0, 0, 0};
  VectorPoly unit;
  for (const auto& p : core) unit.push_back(Rational(1, 8) * p);
  auto jet = jet_transform(unit, change, 2);
  const std::vector<std::string> jring = {"X", "Y", "Z", "a", "b", "c"};
  VectorPoly expect = {parse_poly("Y", jring), parse_poly("Z", jring), parse_poly("a + b*Y + c*Z + X*(X - Z)", jring)};
  rep.checks.push_back({"unfolding_2jet", jet == expect, "Y dX + Z dY + (a + bY + cZ + X(X - Z)) dZ"});
  rep.checks.push_back({"zero_remainder", jet_transform(unit, change) == jet, "no terms above order 2"});

  // numeric parameters: substitute, and compare with the convolution route
  std::vector<MultiPoly> images, jimages;
  const std::vector<std::string> XYZ = {"X", "Y", "Z"};
  for (std::size_t k = 0; k < 3; ++k) {
    images.push_back(MultiPoly::variable(xyz, k));
    jimages.push_back(MultiPoly::variable(XYZ, k));
  }
  for (const auto& v : {a, b, c}) {
    images.push_back(MultiPoly::constant(xyz, v));
    jimages.push_back(MultiPoly::constant(XYZ, v));
  }
  for (const auto& p : core) rep.core.push_back(p.substitute(images));
  for (const auto& p : jet) rep.jet.push_back(p.substitute(jimages));

  std::vector<VectorPoly> branches;
  for (const auto& k : consts) {
    VectorPoly v;
    for (const auto& p : k) v.push_back(p.substitute(std::vector<MultiPoly>(images.begin() + 3, images.end())));
    branches.push_back(v);
  }
  PiecewiseField field(NormalCrossingsLocus(3, {1, 2, 3}), xyz, branches);
  auto conv = convolve_symbolic(field, ChartMap::family(3, {1, 2, 3}), Mollifier::box());
  auto cvars = chart_variables(field);
  bool agree = true;
  for (std::size_t k = 0; k < 3; ++k) agree = agree && Rational(8) * conv.components[k] == rep.core[k].embed(cvars);
  rep.checks.push_back({"convolution_route", agree, "box convolution in the family chart equals the weighted sum"});
  rep.checks.push_back({"unfolding_constant", rep.jet[2].constant_term() == a, "Z-component constant term " +
                                                                                    rational_to_string(rep.jet[2].constant_term())});
  return rep;
}

PiecewiseField smoothing_example(int axes) {
  auto build = [](int n, const std::vector<int>& I, const std::vector<std::vector<std::string>>& comps) {
    std::vector<std::string> vars = {"x", "y", "z"};
    vars.resize(static_cast<std::size_t>(n));
    std::vector<VectorPoly> branches;
    for (const auto& b : comps) {
      VectorPoly v;
      for (const auto& c : b) v.push_back(parse_poly(c, vars));
      branches.push_back(v);
    }
    return PiecewiseField(NormalCrossingsLocus(n, I), vars, branches);
  };
  switch (axes) {
    case 1: return build(2, {1}, {{"-1 + y^2", "x - y"}, {"1 + x*y", "2"}});
    case 2: return build(2, {1, 2}, {{"1", "y"}, {"-1", "x"}, {"x*y", "-1"}, {"2", "1 - x"}});
    case 3: {
      std::vector<std::vector<std::string>> comps;
      for (const auto& k : spatial_constants()) {
        std::vector<std::string> row;
        for (const auto& p : k) row.push_back(rational_to_string(p.constant_term()));
        comps.push_back(row);
      }
      return build(3, {1, 2, 3}, comps);
    }
    default: throw Error(ErrorCode::InvalidArgument, "smoothing examples have 1, 2 or 3 axes");
  }
}

PiecewiseField single_axis_example() {
  const std::vector<std::string> vars = {"x", "y", "z"};
  auto v = [&](const char* a, const char* b, const char* c) {
    return VectorPoly{parse_poly(a, vars), parse_poly(b, vars), parse_poly(c, vars)};
  };
  return PiecewiseField(NormalCrossingsLocus(3, {1}), vars,
                        {v("1 + y*z - x", "y^2 + x", "1 - z"), v("-1 + z + 2*x", "2*y - x*z", "y")});
}

nlohmann::json VerticalReport::to_json() const {
  return {{"samples", samples},
          {"max_horizontal", max_horizontal},
          {"max_weight_residual", max_weight_residual},
          {"tol", tol},
          {"pass", pass()}};
}

VerticalReport vertical_divisor_check(const PiecewiseField& field, const Mollifier& m, int y_points, int x_points) {
  const auto& loc = field.locus();
  if (loc.active() != std::vector<int>{1}) throw Error(ErrorCode::InvalidArgument, "expected the locus {x_1 = 0}");
  if (y_points < 2 || x_points < 2) throw Error(ErrorCode::InvalidArgument, "grids need at least 2 points");
  const int n = field.dimension();
  RegularizedField rf(field, m);
  const auto chart = ChartMap::family(n, {1});
  const auto& plus = field.branch(0);
  const auto& minus = field.branch(1);

  VerticalReport rep;
  std::size_t cells = 1;
  for (int k = 1; k < n; ++k) cells *= static_cast<std::size_t>(x_points);
  std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0), x(static_cast<std::size_t>(n), 0.0);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    std::size_t c = cell;
    for (int k = 1; k < n; ++k) {
      const double v = -0.9 + 1.8 * static_cast<double>(c % static_cast<std::size_t>(x_points)) / (x_points - 1);
      c /= static_cast<std::size_t>(x_points);
      w[static_cast<std::size_t>(k)] = v;
      x[static_cast<std::size_t>(k)] = v;
    }
    x[0] = 0.0;
    const double fp = plus[0].evaluate(x), fm = minus[0].evaluate(x);
    for (int i = 0; i < y_points; ++i) {
      const double y = -1.5 + 3.0 * i / (y_points - 1);
      w[0] = y;
      w[static_cast<std::size_t>(n)] = 0.0;
      auto g = rf.generator(chart, w);
      for (std::size_t k = 1; k < g.size(); ++k) rep.max_horizontal = std::max(rep.max_horizontal, std::abs(g[k]));
      const auto wt = weight_functions(m, y);
      rep.max_weight_residual = std::max(rep.max_weight_residual, std::abs(g[0] - (fp * wt.plus + fm * wt.minus)));
      ++rep.samples;
    }
  }
  return rep;
}

nlohmann::json STLinkReport::to_json() const {
  return {{"eps", eps}, {"K", K}, {"spread", spread}, {"max_spread", max_spread}, {"pass", pass()}};
}

STLinkReport st_link(const PiecewiseField& field, const Mollifier& m, const std::vector<double>& eps, int points) {
  const auto& loc = field.locus();
  if (loc.active() != std::vector<int>{1}) throw Error(ErrorCode::InvalidArgument, "expected the locus {x_1 = 0}");
  if (points < 2) throw Error(ErrorCode::InvalidArgument, "grids need at least 2 points");
  const int n = field.dimension();
  RegularizedField rf(field, m);
  STLinkReport rep;
  rep.eps = eps;
  std::size_t cells = 1;
  for (int k = 0; k < n; ++k) cells *= static_cast<std::size_t>(points);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (double e : eps) {
    if (!(e > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    double sup = 0.0;
    for (std::size_t cell = 0; cell < cells; ++cell) {
      std::size_t c = cell;
      for (int k = 0; k < n; ++k) {
        const double u = -1.0 + 2.0 * static_cast<double>(c % static_cast<std::size_t>(points)) / (points - 1);
        c /= static_cast<std::size_t>(points);
        x[static_cast<std::size_t>(k)] = k == 0 ? e * u : u;
      }
      auto a = rf.evaluate(x, e);
      auto b = st_regularize(field.branch(0), field.branch(1), m, x, e);
      for (std::size_t k = 0; k < a.size(); ++k) sup = std::max(sup, std::abs(a[k] - b[k]));
    }
    rep.K.push_back(sup / e);
  }
  if (!rep.K.empty()) {
    const auto [lo, hi] = std::minmax_element(rep.K.begin(), rep.K.end());
    rep.spread = *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
  }
  return rep;
}

}  // namespace crossreg
