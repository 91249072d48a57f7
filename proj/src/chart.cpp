#include "crossreg/chart.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "crossreg/error.hpp"

namespace crossreg {

namespace {

IntMatrix unit_matrix(std::size_t d) {
  IntMatrix m(d, std::vector<int>(d, 0));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = 1;
  return m;
}

IntMatrix integer_inverse(const IntMatrix& E) {
  const std::size_t d = E.size();
  std::vector<std::vector<Rational>> a(d, std::vector<Rational>(2 * d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) a[i][j] = E[i][j];
    a[i][d + i] = 1;
  }
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t p = c;
    while (p < d && a[p][c] == 0) ++p;
    if (p == d) throw Error(ErrorCode::UnsupportedChart, "exponent matrix is singular");
    std::swap(a[p], a[c]);
    Rational piv = a[c][c];
    for (auto& v : a[c]) v /= piv;
    for (std::size_t r = 0; r < d; ++r) {
      if (r == c || a[r][c] == 0) continue;
      Rational f = a[r][c];
      for (std::size_t k = 0; k < 2 * d; ++k) a[r][k] -= f * a[c][k];
    }
  }
  IntMatrix inv(d, std::vector<int>(d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const Rational& v = a[i][d + j];
      if (v.get_den() != 1) throw Error(ErrorCode::UnsupportedChart, "exponent matrix is not unimodular");
      inv[i][j] = static_cast<int>(v.get_num().get_si());
    }
  }
  return inv;
}

std::string axis_set(const std::vector<int>& R) {
  std::string s = "{";
  for (std::size_t k = 0; k < R.size(); ++k) s += (k ? "," : "") + std::to_string(R[k]);
  return s + "}";
}

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

void check_axes(int n, const std::vector<int>& R) {
  for (std::size_t k = 0; k < R.size(); ++k) {
    if (R[k] < 1 || R[k] > n) throw Error(ErrorCode::BadAxis, "axis " + std::to_string(R[k]) + " outside 1.." + std::to_string(n));
    for (std::size_t l = 0; l < k; ++l) {
      if (R[l] == R[k]) throw Error(ErrorCode::DuplicateAxis, "axis " + std::to_string(R[k]) + " repeated");
    }
  }
}

}  // namespace

double monomial_value(std::span<const int> exps, std::span<const double> w) {
  double r = 1.0;
  for (std::size_t j = 0; j < exps.size(); ++j) {
    int e = exps[j];
    if (e > 0) {
      r *= ipow(w[j], e);
    } else if (e < 0) {
      if (w[j] == 0.0) throw Error(ErrorCode::OnDivisor, "negative power of a vanishing chart variable");
      r /= ipow(w[j], -e);
    }
  }
  return r;
}

namespace {

// Powers w_j^e, 0 <= e <= top, for evaluating many monomials at one point.
struct PowerTable {
  static constexpr std::size_t kDim = 8;
  static constexpr int kTop = 16;
  std::array<std::array<double, kTop + 1>, kDim> p;
  std::span<const double> w;
  bool usable;

  PowerTable(std::span<const double> pt, int top) : w(pt), usable(pt.size() <= kDim && top <= kTop) {
    if (!usable) return;
    for (std::size_t j = 0; j < pt.size(); ++j) {
      p[j][0] = 1.0;
      for (int e = 1; e <= top; ++e) p[j][static_cast<std::size_t>(e)] = p[j][static_cast<std::size_t>(e) - 1] * pt[j];
    }
  }

  double operator()(std::span<const int> exps) const {
    if (!usable) return monomial_value(exps, w);
    double r = 1.0;
    for (std::size_t j = 0; j < exps.size(); ++j) {
      int e = exps[j];
      if (e > 0) {
        r *= p[j][static_cast<std::size_t>(e)];
      } else if (e < 0) {
        if (w[j] == 0.0) throw Error(ErrorCode::OnDivisor, "negative power of a vanishing chart variable");
        r /= p[j][static_cast<std::size_t>(-e)];
      }
    }
    return r;
  }
};

int top_exponent(const IntMatrix& m, int top) {
  for (const auto& row : m) {
    for (int e : row) top = std::max(top, std::abs(e));
  }
  return top;
}

}  // namespace

void ChartMap::finalize() {
  Einv_ = integer_inverse(E_);
  const std::size_t d = dim();
  divided_terms_.clear();
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      if (Einv_[j][k] == 0) continue;
      std::vector<int> ex(d);
      for (std::size_t m = 0; m < d; ++m) ex[m] = (m == j ? 1 : 0) + divisor_[m] - E_[k][m];
      divided_terms_.push_back({j, k, Einv_[j][k] * signs_[k], std::move(ex)});
    }
  }
  ratio_num_.assign(d - 1, std::vector<int>(d));
  ratio_den_.assign(d - 1, std::vector<int>(d));
  for (std::size_t a = 0; a + 1 < d; ++a) {
    for (std::size_t j = 0; j < d; ++j) {
      int g = std::min(E_[a][j], E_[d - 1][j]);
      ratio_num_[a][j] = E_[a][j] - g;
      ratio_den_[a][j] = E_[d - 1][j] - g;
    }
  }
  top_ = top_exponent(E_, 0);
  for (const auto& t : divided_terms_) {
    for (int e : t.exps) top_ = std::max(top_, std::abs(e));
  }
}

bool ChartMap::has_divisor() const {
  return std::any_of(divisor_.begin(), divisor_.end(), [](int e) { return e != 0; });
}

ChartMap ChartMap::identity(int n) {
  if (n <= 0) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  ChartMap c;
  c.n_ = n;
  const auto d = static_cast<std::size_t>(n) + 1;
  c.E_ = unit_matrix(d);
  c.signs_.assign(d, 1);
  c.nonneg_.assign(d, false);
  c.nonneg_[d - 1] = true;
  c.divisor_.assign(d, 0);
  c.id_ = "id";
  c.finalize();
  return c;
}

ChartMap ChartMap::phase(int n, const std::vector<int>& R, int i1, int sign) {
  check_axes(n, R);
  if (std::find(R.begin(), R.end(), i1) == R.end()) throw Error(ErrorCode::BadAxis, "axis " + std::to_string(i1) + " not in " + axis_set(R));
  if (sign != 1 && sign != -1) throw Error(ErrorCode::InvalidArgument, "sign must be +1 or -1");
  ChartMap c = identity(n);
  const auto r = static_cast<std::size_t>(i1 - 1);
  const auto e = static_cast<std::size_t>(n);
  c.signs_[r] = sign;
  for (int i : R) {
    if (i != i1) c.E_[static_cast<std::size_t>(i - 1)][r] = 1;
  }
  c.E_[e][r] = 1;
  c.nonneg_[r] = true;
  c.divisor_[r] = 1;
  c.id_ = "phase(I=" + axis_set(R) + ",i1=" + std::to_string(i1) + "," + (sign > 0 ? "+" : "-") + ")";
  c.finalize();
  return c;
}

ChartMap ChartMap::family(int n, const std::vector<int>& R) {
  check_axes(n, R);
  ChartMap c = identity(n);
  const auto e = static_cast<std::size_t>(n);
  for (int i : R) c.E_[static_cast<std::size_t>(i - 1)][e] = 1;
  if (!R.empty()) c.divisor_[e] = 1;
  c.id_ = "family(I=" + axis_set(R) + ")";
  c.finalize();
  return c;
}

ChartMap compose(const ChartMap& outer, const ChartMap& inner) {
  if (outer.n_ != inner.n_) throw Error(ErrorCode::InvalidArgument, "chart dimension mismatch");
  const std::size_t d = outer.dim();
  ChartMap c;
  c.n_ = outer.n_;
  c.E_.assign(d, std::vector<int>(d, 0));
  c.signs_.assign(d, 1);
  for (std::size_t k = 0; k < d; ++k) {
    int s = outer.signs_[k];
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t m = 0; m < d; ++m) c.E_[k][m] += outer.E_[k][j] * inner.E_[j][m];
      if (inner.signs_[j] < 0 && outer.E_[k][j] % 2 != 0) s = -s;
    }
    c.signs_[k] = s;
  }
  c.divisor_.assign(d, 0);
  int dsign = 1;
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t m = 0; m < d; ++m) c.divisor_[m] += outer.divisor_[j] * inner.E_[j][m];
    if (inner.signs_[j] < 0 && outer.divisor_[j] % 2 != 0) dsign = -dsign;
  }
  if (dsign < 0) throw Error(ErrorCode::UnsupportedChart, "divisor monomial changes sign under composition");
  for (std::size_t m = 0; m < d; ++m) c.divisor_[m] += inner.divisor_[m];
  c.nonneg_ = inner.nonneg_;
  for (std::size_t j = 0; j < d; ++j) {
    bool passthrough = inner.signs_[j] > 0;
    for (std::size_t m = 0; m < d; ++m) passthrough = passthrough && inner.E_[j][m] == (m == j ? 1 : 0);
    if (passthrough && outer.nonneg_[j]) c.nonneg_[j] = true;
  }
  if (outer.id_ == "id") {
    c.id_ = inner.id_;
  } else if (inner.id_ == "id") {
    c.id_ = outer.id_;
  } else {
    c.id_ = outer.id_ + " o " + inner.id_;
  }
  c.finalize();
  return c;
}

double ChartMap::old_coordinate(std::size_t k, std::span<const double> w) const {
  return signs_[k] * monomial_value(E_[k], w);
}

std::vector<double> ChartMap::map(std::span<const double> w) const {
  if (w.size() != dim()) throw Error(ErrorCode::InvalidArgument, "chart point has wrong dimension");
  std::vector<double> p(dim());
  for (std::size_t k = 0; k < dim(); ++k) p[k] = old_coordinate(k, w);
  return p;
}

std::vector<double> ChartMap::inverse_map(std::span<const double> p) const {
  if (p.size() != dim()) throw Error(ErrorCode::InvalidArgument, "point has wrong dimension");
  std::vector<double> sp(dim());
  for (std::size_t k = 0; k < dim(); ++k) sp[k] = signs_[k] * p[k];
  std::vector<double> w(dim());
  for (std::size_t j = 0; j < dim(); ++j) w[j] = monomial_value(Einv_[j], sp);
  return w;
}

double ChartMap::divisor_value(std::span<const double> w) const { return monomial_value(divisor_, w); }

std::vector<std::vector<double>> ChartMap::jacobian(std::span<const double> w) const {
  std::vector<std::vector<double>> J(dim(), std::vector<double>(dim(), 0.0));
  for (std::size_t k = 0; k < dim(); ++k) {
    for (std::size_t j = 0; j < dim(); ++j) {
      if (E_[k][j] == 0) continue;
      std::vector<int> e = E_[k];
      e[j] -= 1;
      J[k][j] = signs_[k] * E_[k][j] * monomial_value(e, w);
    }
  }
  return J;
}

std::vector<double> ChartMap::pushforward(std::span<const double> w, std::span<const double> v) const {
  auto J = jacobian(w);
  std::vector<double> out(dim(), 0.0);
  for (std::size_t k = 0; k < dim(); ++k) {
    for (std::size_t j = 0; j < dim(); ++j) out[k] += J[k][j] * v[j];
  }
  return out;
}

std::pair<double, double> ChartMap::reduced_ratio(int axis, std::span<const double> w) const {
  const auto a = static_cast<std::size_t>(axis - 1);
  return {signs_[a] * monomial_value(ratio_num_[a], w), signs_[dim() - 1] * monomial_value(ratio_den_[a], w)};
}

void ChartMap::map_into(std::span<const double> w, std::span<double> out) const {
  PowerTable pw(w, top_);
  for (std::size_t k = 0; k < dim(); ++k) out[k] = signs_[k] * pw(E_[k]);
}

void ChartMap::frame_into(std::span<const double> w, std::span<const int> axes, std::span<double> p,
                          std::span<double> num, std::span<double> den) const {
  PowerTable pw(w, top_);
  for (std::size_t k = 0; k < dim(); ++k) p[k] = signs_[k] * pw(E_[k]);
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const auto a = static_cast<std::size_t>(axes[i] - 1);
    num[i] = signs_[a] * pw(ratio_num_[a]);
    den[i] = signs_[dim() - 1] * pw(ratio_den_[a]);
  }
}

void ChartMap::divided_into(std::span<const double> w, std::span<const double> F, std::span<double> out) const {
  PowerTable pw(w, top_);
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(dim()), 0.0);
  for (const auto& t : divided_terms_) {
    if (F[t.k] == 0.0) continue;
    out[t.j] += t.coef * pw(t.exps) * F[t.k];
  }
}

std::pair<MultiPoly, MultiPoly> ChartMap::reduced_ratio_poly(int axis, const std::vector<std::string>& vars) const {
  const auto a = static_cast<std::size_t>(axis - 1);
  const auto e = dim() - 1;
  Exponent ea(dim()), eb(dim());
  for (std::size_t j = 0; j < dim(); ++j) {
    int g = std::min(E_[a][j], E_[e][j]);
    ea[j] = E_[a][j] - g;
    eb[j] = E_[e][j] - g;
  }
  return {MultiPoly::monomial(vars, ea, Rational(signs_[a])), MultiPoly::monomial(vars, eb, Rational(signs_[e]))};
}

std::vector<double> ChartMap::pullback(std::span<const double> w, std::span<const double> F) const {
  if (has_divisor() && divisor_value(w) == 0.0) throw Error(ErrorCode::OnDivisor, "pullback evaluated on the exceptional divisor");
  std::vector<double> V(dim(), 0.0);
  std::vector<int> ex(dim());
  for (std::size_t j = 0; j < dim(); ++j) {
    for (std::size_t k = 0; k < dim(); ++k) {
      if (Einv_[j][k] == 0 || F[k] == 0.0) continue;
      for (std::size_t m = 0; m < dim(); ++m) ex[m] = (m == j ? 1 : 0) - E_[k][m];
      V[j] += Einv_[j][k] * signs_[k] * monomial_value(ex, w) * F[k];
    }
  }
  return V;
}

std::vector<double> ChartMap::divided(std::span<const double> w, std::span<const double> F) const {
  std::vector<double> V(dim(), 0.0);
  divided_into(w, F, V);
  return V;
}

std::vector<MultiPoly> ChartMap::coordinate_polys(const std::vector<std::string>& vars) const {
  if (vars.size() != dim()) throw Error(ErrorCode::InvalidArgument, "chart ring has wrong size");
  std::vector<MultiPoly> out;
  for (std::size_t k = 0; k < dim(); ++k) out.push_back(MultiPoly::monomial(vars, E_[k], Rational(signs_[k])));
  return out;
}

std::vector<MultiPoly> ChartMap::divided_symbolic(const std::vector<MultiPoly>& F) const {
  if (F.size() != dim()) throw Error(ErrorCode::InvalidArgument, "field has wrong number of components");
  const auto& vars = F.front().variables();
  std::vector<MultiPoly> out(dim(), MultiPoly(vars));
  for (std::size_t j = 0; j < dim(); ++j) {
    for (std::size_t k = 0; k < dim(); ++k) {
      if (Einv_[j][k] == 0 || F[k].is_zero()) continue;
      MultiPoly term(vars);
      for (const auto& [e, c] : F[k].terms()) {
        Exponent ne = e;
        for (std::size_t m = 0; m < dim(); ++m) {
          ne[m] += (m == j ? 1 : 0) + divisor_[m] - E_[k][m];
          if (ne[m] < 0) throw Error(ErrorCode::UnsupportedChart, "divided pullback is not polynomial in chart " + id_);
        }
        term += MultiPoly::monomial(vars, ne, c);
      }
      out[j] += Rational(Einv_[j][k] * signs_[k]) * term;
    }
  }
  return out;
}

nlohmann::json ChartMap::to_json() const {
  return {{"id", id_}, {"exponents", E_}, {"signs", signs_}, {"nonneg", nonneg_}, {"divisor", divisor_}};
}

ChartMap composed_chart(int n, const std::vector<int>& I, const std::vector<int>& chain,
                        const std::vector<int>& chain_signs) {
  check_axes(n, I);
  check_axes(n, chain);
  if (!chain_signs.empty() && chain_signs.size() != chain.size()) throw Error(ErrorCode::InvalidArgument, "one sign per chain entry");
  ChartMap c = ChartMap::identity(n);
  std::vector<int> R = I;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    if (std::find(R.begin(), R.end(), chain[k]) == R.end()) {
      if (std::find(I.begin(), I.end(), chain[k]) == I.end()) throw Error(ErrorCode::BadAxis, "axis " + std::to_string(chain[k]) + " not in I");
      throw Error(ErrorCode::DuplicateAxis, "axis " + std::to_string(chain[k]) + " repeated in chain");
    }
    int s = chain_signs.empty() ? 1 : chain_signs[k];
    c = compose(c, ChartMap::phase(n, R, chain[k], s));
    R.erase(std::find(R.begin(), R.end(), chain[k]));
  }
  return c;
}

SmoothingPlan smoothing_plan(const NormalCrossingsLocus& locus) {
  if (locus.empty()) throw Error(ErrorCode::EmptyLocus, "nothing to smooth");
  const int n = locus.dimension();
  const auto& I = locus.active();
  SmoothingPlan plan;
  plan.locus = locus;
  // Stage k blows up every stratum Sigma_J with |J| = |I| - k; same-size strata are disjoint after the earlier stages.
  for (std::size_t size = I.size(); size >= 1; --size) {
    std::vector<std::vector<int>> strata;
    std::vector<int> pick;
    std::function<void(std::size_t)> choose = [&](std::size_t from) {
      if (pick.size() == size) {
        strata.push_back(pick);
        return;
      }
      for (std::size_t k = from; k < I.size(); ++k) {
        pick.push_back(I[k]);
        choose(k + 1);
        pick.pop_back();
      }
    };
    choose(0);
    plan.centers.push_back(strata);
  }
  std::function<void(const ChartMap&, std::vector<int>, std::vector<std::pair<int, int>>)> grow =
      [&](const ChartMap& prefix, std::vector<int> R, std::vector<std::pair<int, int>> dropped) {
        if (R.empty()) {
          plan.atlas.push_back({prefix, dropped, {}, {}});
          return;
        }
        plan.atlas.push_back({compose(prefix, ChartMap::family(n, R)), dropped, R, {}});
        for (int j : R) {
          for (int s : {1, -1}) {
            std::vector<int> rest;
            for (int i : R) {
              if (i != j) rest.push_back(i);
            }
            auto next = dropped;
            next.emplace_back(j, s);
            grow(compose(prefix, ChartMap::phase(n, R, j, s)), rest, next);
          }
        }
      };
  grow(ChartMap::identity(n), I, {});
  return plan;
}

}  // namespace crossreg
