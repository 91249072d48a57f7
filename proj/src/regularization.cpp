#include "crossreg/regularization.hpp"

#include <cmath>

#include "crossreg/error.hpp"

namespace crossreg {

namespace {

// Interval {t : s (a - b t) > 0} intersected with [-1, 1].
Interval side(double a, double b, int s) {
  if (b == 0.0) {
    if (a == 0.0) throw Error(ErrorCode::OnLocus, "sign test degenerate on the locus");
    return s * a > 0.0 ? Interval{-1.0, 1.0} : Interval{1.0, -1.0};
  }
  double y = a / b;
  bool below = (b > 0.0) == (s > 0);
  return below ? Interval{-1.0, std::min(y, 1.0)} : Interval{std::max(y, -1.0), 1.0};
}

}  // namespace

RegularizedField::RegularizedField(PiecewiseField base, Mollifier mollifier)
    : base_(std::move(base)), m_(mollifier) {
  const auto n = static_cast<std::size_t>(base_.dimension());
  if (n + 1 > kMaxComponents) throw Error(ErrorCode::InvalidArgument, "dimension too large");
  max_degree_.assign(n, 0);
  for (std::size_t b = 0; b < base_.branch_count(); ++b) {
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t a = 0; a < n; ++a) max_degree_[a] = std::max(max_degree_[a], base_.compiled(b, c).max_degree(a));
    }
  }
  int top = *std::max_element(max_degree_.begin(), max_degree_.end());
  if (top > kMaxDegree) throw Error(ErrorCode::InvalidArgument, "branch degree exceeds " + std::to_string(kMaxDegree));
  for (int j = 0; j <= top; ++j) full_moments_.push_back(m_.moment(j, -1.0, 1.0));
  start_.push_back(0);
  for (std::size_t b = 0; b < base_.branch_count(); ++b) {
    for (std::size_t c = 0; c < n; ++c) {
      const auto& cp = base_.compiled(b, c);
      for (std::size_t t = 0; t < cp.exponents().size(); ++t) {
        FlatTerm ft{cp.coefficients()[t], {}};
        for (std::size_t a = 0; a < n; ++a) ft.exps[a] = static_cast<std::uint8_t>(cp.exponents()[t][a]);
        flat_.push_back(ft);
      }
      start_.push_back(flat_.size());
    }
  }
  active_ = base_.locus().active();
  pos_.fill(-1);
  for (std::size_t k = 0; k < active_.size(); ++k) pos_[static_cast<std::size_t>(active_[k] - 1)] = static_cast<int>(k);
}

void RegularizedField::assemble(std::span<const double> x, double eps, const Regions& regions,
                                std::span<double> out) const {
  const auto n = static_cast<std::size_t>(base_.dimension());
  constexpr std::size_t K1 = kMaxDegree + 1;
  // table[a][s][k] = integral over the axis-a region of (x_a - eps t)^k m(t) dt
  std::array<std::array<std::array<double, K1>, 2>, kMaxComponents> table;
  std::array<double, K1> mu;
  std::array<double, K1> xp;
  std::array<double, K1> ep;
  for (std::size_t a = 0; a < n; ++a) {
    const int K = max_degree_[a];
    xp[0] = 1.0;
    ep[0] = 1.0;
    for (int k = 1; k <= K; ++k) {
      xp[static_cast<std::size_t>(k)] = xp[static_cast<std::size_t>(k) - 1] * x[a];
      ep[static_cast<std::size_t>(k)] = -ep[static_cast<std::size_t>(k) - 1] * eps;
    }
    const bool active = pos_[a] >= 0;
    std::array<double, K1> part;
    if (active) {
      const Interval& iv = regions[static_cast<std::size_t>(pos_[a])][0];
      m_.moments(K, iv.lo, iv.hi, part);
    }
    for (std::size_t s = 0; s < (active ? 2u : 1u); ++s) {
      // the two sign regions split [-1, 1]
      for (int j = 0; j <= K; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        mu[ju] = !active ? full_moments_[ju] : s == 0 ? part[ju] : full_moments_[ju] - part[ju];
      }
      auto& row = table[a][s];
      for (int k = 0; k <= K; ++k) {
        double acc = 0.0;
        double c = 1.0;
        for (int j = 0; j <= k; ++j) {
          acc += c * xp[static_cast<std::size_t>(k - j)] * ep[static_cast<std::size_t>(j)] * mu[static_cast<std::size_t>(j)];
          c = c * (k - j) / (j + 1);
        }
        row[static_cast<std::size_t>(k)] = acc;
      }
    }
    if (!active) table[a][1] = table[a][0];
  }
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
  std::array<const double*, kMaxComponents> row{};
  for (std::size_t b = 0; b < base_.branch_count(); ++b) {
    for (std::size_t a = 0; a < n; ++a) row[a] = table[a][0].data();
    for (std::size_t k = 0; k < active_.size(); ++k) {
      const auto a = static_cast<std::size_t>(active_[k] - 1);
      row[a] = table[a][(b >> k) & 1u].data();
    }
    for (std::size_t c = 0; c < n; ++c) {
      double sum = 0.0;
      for (std::size_t t = start_[b * n + c]; t < start_[b * n + c + 1]; ++t) {
        const FlatTerm& ft = flat_[t];
        double v = ft.coef;
        for (std::size_t a = 0; a < n; ++a) v *= row[a][ft.exps[a]];
        sum += v;
      }
      out[c] += sum;
    }
  }
}

std::vector<double> RegularizedField::evaluate(std::span<const double> x, double eps) const {
  if (x.size() != static_cast<std::size_t>(dimension())) throw Error(ErrorCode::InvalidArgument, "point has wrong dimension");
  if (eps < 0.0) throw Error(ErrorCode::InvalidArgument, "eps must be nonnegative");
  if (eps == 0.0) return eval_piecewise(base_, x);
  const auto& locus = base_.locus();
  Regions regions;
  for (std::size_t k = 0; k < locus.size(); ++k) {
    double xa = x[static_cast<std::size_t>(locus.active()[k] - 1)];
    regions[k] = {side(xa, eps, 1), side(xa, eps, -1)};
  }
  std::vector<double> out(x.size());
  assemble(x, eps, regions, out);
  return out;
}

std::vector<double> RegularizedField::evaluate_point(std::span<const double> p) const {
  return evaluate(p.first(p.size() - 1), p.back());
}

std::vector<double> RegularizedField::evaluate_in_chart(const ChartMap& chart, std::span<const double> w) const {
  if (chart.n() != dimension()) throw Error(ErrorCode::InvalidArgument, "chart dimension differs from field");
  const auto n = static_cast<std::size_t>(dimension());
  std::array<double, kMaxComponents> F{};
  chart_values(chart, w, F);
  return std::vector<double>(F.begin(), F.begin() + static_cast<std::ptrdiff_t>(n));
}

void RegularizedField::chart_values(const ChartMap& chart, std::span<const double> w, std::span<double> out) const {
  const auto n = static_cast<std::size_t>(dimension());
  std::array<double, kMaxComponents> p, num, den;
  chart.frame_into(w, active_, p, num, den);
  Regions regions;
  for (std::size_t k = 0; k < active_.size(); ++k) regions[k] = {side(num[k], den[k], 1), side(num[k], den[k], -1)};
  assemble(std::span<const double>(p.data(), n), p[n], regions, out);
}

void RegularizedField::generator_into(const ChartMap& chart, std::span<const double> w, std::span<double> out) const {
  if (chart.n() != dimension()) throw Error(ErrorCode::InvalidArgument, "chart dimension differs from field");
  const auto n = static_cast<std::size_t>(dimension());
  std::array<double, kMaxComponents> F{};
  chart_values(chart, w, F);
  F[n] = 0.0;
  chart.divided_into(w, std::span<const double>(F.data(), n + 1), out);
}

std::vector<double> RegularizedField::generator(const ChartMap& chart, std::span<const double> w) const {
  std::vector<double> out(chart.dim());
  generator_into(chart, w, out);
  return out;
}

namespace {

struct NestedConvolution {
  const CallableField& field;
  const Mollifier& m;
  std::span<const double> x;
  double eps;
  std::size_t n;
  QuadOptions opt;
  std::array<double, kMaxComponents> pt{};

  QVec level(std::size_t a, double tol) {
    if (a == n) {
      QVec v(n);
      std::span<const double> p(pt.data(), n);
      field.branches[field.branch_at(p)](p, std::span<double>(v.v.data(), n));
      return v;
    }
    std::vector<double> cuts = m.breakpoints();
    if (field.locus.contains(static_cast<int>(a + 1)) && eps > 0.0) cuts.push_back(x[a] / eps);
    const double inner = 0.05 * tol;
    auto g = [&](double t) {
      pt[a] = x[a] - eps * t;
      QVec v = level(a + 1, inner);
      double w = m.profile(t);
      for (std::size_t i = 0; i < n; ++i) v[i] *= w;
      return v;
    };
    QuadOptions local = opt;
    local.abs_tol = tol;
    // inner values carry up to `inner` error; the halves test cannot see below it
    local.noise = a + 1 < n ? 2.0 * inner : 0.0;
    return integrate_pieces(g, -1.0, 1.0, cuts, n, local);
  }
};

}  // namespace

std::vector<double> convolve_numeric(const CallableField& field, const Mollifier& m, std::span<const double> x,
                                     double eps, const QuadOptions& opt) {
  const auto n = static_cast<std::size_t>(field.locus.dimension());
  if (x.size() != n) throw Error(ErrorCode::InvalidArgument, "point has wrong dimension");
  if (n > kMaxComponents) throw Error(ErrorCode::InvalidArgument, "dimension too large for quadrature");
  if (eps < 0.0) throw Error(ErrorCode::InvalidArgument, "eps must be nonnegative");
  std::vector<double> out(n);
  if (eps == 0.0) {
    field.branches[field.branch_at(x)](x, out);
    return out;
  }
  NestedConvolution nc{field, m, x, eps, n, opt};
  QVec v = nc.level(0, opt.abs_tol);
  for (std::size_t i = 0; i < n; ++i) out[i] = v[i];
  return out;
}

std::vector<double> convolve_numeric(const RegularizedField& rf, std::span<const double> x, double eps,
                                     const QuadOptions& opt) {
  return convolve_numeric(CallableField::from(rf.base()), rf.mollifier(), x, eps, opt);
}

std::vector<double> st_regularize(const VectorPoly& Xplus, const VectorPoly& Xminus, const Mollifier& m,
                                  std::span<const double> x, double eps, int axis) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  if (Xplus.size() != Xminus.size() || Xplus.size() != x.size()) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  if (axis < 1 || static_cast<std::size_t>(axis) > x.size()) throw Error(ErrorCode::BadAxis, "axis out of range");
  double phi = weight_functions(m, x[static_cast<std::size_t>(axis - 1)] / eps).phi;
  std::vector<double> out(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) {
    out[c] = 0.5 * (1.0 + phi) * Xplus[c].evaluate(x) + 0.5 * (1.0 - phi) * Xminus[c].evaluate(x);
  }
  return out;
}

MultiPoly box_moment(int j, const MultiPoly& a, const MultiPoly& b) {
  if (j < 0) throw Error(ErrorCode::InvalidArgument, "moment order must be nonnegative");
  auto ju = static_cast<unsigned>(j + 1);
  return Rational(1, 2 * (j + 1)) * (b.pow(ju) - a.pow(ju));
}

std::vector<std::string> chart_variables(const PiecewiseField& field) {
  auto vars = field.variables();
  vars.push_back("eps");
  return vars;
}

bool CoreRegionPoly::in_core(std::span<const double> w) const {
  for (const auto& v : validity) {
    if (std::abs(v.evaluate(w)) > 1.0) return false;
  }
  return true;
}

nlohmann::json CoreRegionPoly::to_json() const {
  nlohmann::json comps = nlohmann::json::array();
  nlohmann::json text = nlohmann::json::array();
  for (const auto& c : components) {
    comps.push_back(poly_to_json(c));
    text.push_back(c.to_string());
  }
  nlohmann::json box = nlohmann::json::array();
  for (const auto& v : validity) box.push_back("|" + v.to_string() + "| <= 1");
  return {{"chart_id", chart_id}, {"variables", variables}, {"components", comps}, {"expressions", text}, {"validity", box}};
}

CoreRegionPoly convolve_symbolic(const PiecewiseField& field, const ChartMap& chart, const Mollifier& m) {
  if (!m.is_box()) throw Error(ErrorCode::UnsupportedMollifier, "symbolic convolution needs the box mollifier");
  if (chart.n() != field.dimension()) throw Error(ErrorCode::InvalidArgument, "chart dimension differs from field");
  const auto n = static_cast<std::size_t>(field.dimension());
  const auto& locus = field.locus();
  auto cvars = chart_variables(field);
  auto tvars = cvars;
  for (std::size_t a = 0; a < n; ++a) tvars.push_back("_t" + std::to_string(a + 1));

  CoreRegionPoly out;
  out.chart_id = chart.id();
  out.variables = cvars;
  std::vector<MultiPoly> ratio(n);
  for (int axis : locus.active()) {
    auto [num, den] = chart.reduced_ratio_poly(axis, cvars);
    if (!(den == MultiPoly::constant(cvars, 1))) {
      throw Error(ErrorCode::UnsupportedChart, "x" + std::to_string(axis) + "/eps is not polynomial in chart " + chart.id());
    }
    ratio[static_cast<std::size_t>(axis - 1)] = num.embed(tvars);
    out.validity.push_back(num);
  }
  auto coords = chart.coordinate_polys(cvars);
  MultiPoly eps = coords[n].embed(tvars);
  std::vector<MultiPoly> shifted;
  for (std::size_t a = 0; a < n; ++a) shifted.push_back(coords[a].embed(tvars) - eps * MultiPoly::variable(tvars, n + 1 + a));
  const MultiPoly one = MultiPoly::constant(tvars, 1);
  const MultiPoly minus_one = MultiPoly::constant(tvars, -1);

  out.components.assign(n, MultiPoly(tvars));
  for (std::size_t b = 0; b < field.branch_count(); ++b) {
    for (std::size_t c = 0; c < n; ++c) {
      MultiPoly g = field.branch(b)[c].substitute(shifted);
      for (std::size_t a = 0; a < n; ++a) {
        MultiPoly lo = minus_one, hi = one;
        if (locus.contains(static_cast<int>(a + 1))) {
          bool minus = (b >> locus.position(static_cast<int>(a + 1))) & 1u;
          (minus ? lo : hi) = ratio[a];
        }
        g = Rational(1, 2) * g.integrate(n + 1 + a, lo, hi);
      }
      out.components[c] += g;
    }
  }
  for (auto& c : out.components) c = c.embed(cvars);
  return out;
}

}  // namespace crossreg
