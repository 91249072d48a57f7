#include "crossreg/piecewise.hpp"

#include <algorithm>

#include "crossreg/error.hpp"

namespace crossreg {

namespace {

// Index in the dropped field for old branch `index` after removing active position `pos`.
std::size_t squeeze_bit(std::size_t index, std::size_t pos) {
  std::size_t low = index & ((std::size_t{1} << pos) - 1);
  std::size_t high = index >> (pos + 1);
  return low | (high << pos);
}

std::size_t insert_bit(std::size_t index, std::size_t pos, int sign) {
  std::size_t low = index & ((std::size_t{1} << pos) - 1);
  std::size_t high = index >> pos;
  return low | (std::size_t{sign < 0 ? 1u : 0u} << pos) | (high << (pos + 1));
}

}  // namespace

NormalCrossingsLocus::NormalCrossingsLocus(int n, std::vector<int> active) : n_(n), active_(std::move(active)) {
  if (n <= 0) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  std::sort(active_.begin(), active_.end());
  for (std::size_t k = 0; k < active_.size(); ++k) {
    if (active_[k] < 1 || active_[k] > n) throw Error(ErrorCode::BadAxis, "axis " + std::to_string(active_[k]) + " outside 1.." + std::to_string(n));
    if (k > 0 && active_[k] == active_[k - 1]) throw Error(ErrorCode::DuplicateAxis, "axis " + std::to_string(active_[k]) + " repeated");
  }
}

bool NormalCrossingsLocus::contains(int axis) const {
  return std::binary_search(active_.begin(), active_.end(), axis);
}

std::size_t NormalCrossingsLocus::position(int axis) const {
  auto it = std::lower_bound(active_.begin(), active_.end(), axis);
  if (it == active_.end() || *it != axis) throw Error(ErrorCode::BadAxis, "axis " + std::to_string(axis) + " is not active");
  return static_cast<std::size_t>(it - active_.begin());
}

SignVector::SignVector(std::map<int, int> signs) : signs_(std::move(signs)) {
  for (const auto& [axis, s] : signs_) {
    if (s != 1 && s != -1) throw Error(ErrorCode::InvalidArgument, "sign must be +1 or -1");
  }
}

SignVector SignVector::from_index(const NormalCrossingsLocus& locus, std::size_t index) {
  std::map<int, int> s;
  for (std::size_t k = 0; k < locus.size(); ++k) s[locus.active()[k]] = (index >> k) & 1u ? -1 : 1;
  return SignVector(std::move(s));
}

std::size_t SignVector::index(const NormalCrossingsLocus& locus) const {
  if (signs_.size() != locus.size()) throw Error(ErrorCode::InvalidArgument, "sign vector domain differs from active axes");
  std::size_t idx = 0;
  for (std::size_t k = 0; k < locus.size(); ++k) {
    auto it = signs_.find(locus.active()[k]);
    if (it == signs_.end()) throw Error(ErrorCode::InvalidArgument, "sign vector domain differs from active axes");
    if (it->second < 0) idx |= std::size_t{1} << k;
  }
  return idx;
}

int SignVector::at(int axis) const {
  auto it = signs_.find(axis);
  if (it == signs_.end()) throw Error(ErrorCode::BadAxis, "no sign for axis " + std::to_string(axis));
  return it->second;
}

PiecewiseField::PiecewiseField(NormalCrossingsLocus locus, std::vector<std::string> vars, std::vector<VectorPoly> branches)
    : locus_(std::move(locus)), vars_(std::move(vars)), branches_(std::move(branches)) {
  const auto n = static_cast<std::size_t>(locus_.dimension());
  if (vars_.size() != n) throw Error(ErrorCode::InvalidArgument, "variable list must have n entries");
  if (branches_.size() != (std::size_t{1} << locus_.size())) {
    throw Error(ErrorCode::InvalidArgument, "expected 2^|I| branches");
  }
  compiled_.resize(branches_.size());
  for (std::size_t b = 0; b < branches_.size(); ++b) {
    if (branches_[b].size() != n) throw Error(ErrorCode::InvalidArgument, "branch must have n components");
    for (auto& c : branches_[b]) {
      if (c.variables() != vars_) c = c.embed(vars_);
      compiled_[b].emplace_back(c);
    }
  }
}

PiecewiseField PiecewiseField::from_map(NormalCrossingsLocus locus, std::vector<std::string> vars,
                                        const std::map<SignVector, VectorPoly>& branches) {
  std::vector<VectorPoly> list(std::size_t{1} << locus.size());
  std::vector<bool> seen(list.size(), false);
  for (const auto& [s, comps] : branches) {
    std::size_t idx = s.index(locus);
    list[idx] = comps;
    seen[idx] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw Error(ErrorCode::InvalidArgument, "missing branch for some sign vector");
  }
  return PiecewiseField(std::move(locus), std::move(vars), std::move(list));
}

PiecewiseField PiecewiseField::smooth(std::vector<std::string> vars, VectorPoly components) {
  NormalCrossingsLocus locus(static_cast<int>(vars.size()), {});
  return PiecewiseField(std::move(locus), std::move(vars), {std::move(components)});
}

std::size_t PiecewiseField::branch_at(std::span<const double> x) const {
  if (x.size() != vars_.size()) throw Error(ErrorCode::InvalidArgument, "point has wrong dimension");
  std::size_t idx = 0;
  for (std::size_t k = 0; k < locus_.size(); ++k) {
    double v = x[static_cast<std::size_t>(locus_.active()[k] - 1)];
    if (v == 0.0) throw Error(ErrorCode::OnLocus, "coordinate " + std::to_string(locus_.active()[k]) + " is zero");
    if (v < 0.0) idx |= std::size_t{1} << k;
  }
  return idx;
}

std::vector<double> PiecewiseField::evaluate_branch(std::size_t index, std::span<const double> x) const {
  std::vector<double> out;
  out.reserve(compiled_[index].size());
  for (const auto& c : compiled_[index]) out.push_back(c(x));
  return out;
}

std::vector<double> eval_piecewise(const PiecewiseField& field, std::span<const double> x) {
  return field.evaluate_branch(field.branch_at(x), x);
}

PiecewiseField drop_component(const PiecewiseField& field, int i1, int sign) {
  const auto& locus = field.locus();
  std::size_t pos = locus.position(i1);
  if (sign != 1 && sign != -1) throw Error(ErrorCode::InvalidArgument, "sign must be +1 or -1");
  std::vector<int> rest;
  for (int a : locus.active()) {
    if (a != i1) rest.push_back(a);
  }
  NormalCrossingsLocus reduced(locus.dimension(), rest);
  std::vector<VectorPoly> branches(std::size_t{1} << reduced.size());
  for (std::size_t idx = 0; idx < branches.size(); ++idx) branches[idx] = field.branch(insert_bit(idx, pos, sign));
  return PiecewiseField(std::move(reduced), field.variables(), std::move(branches));
}

CallableField CallableField::from(const PiecewiseField& field) {
  CallableField out{field.locus(), {}};
  for (std::size_t b = 0; b < field.branch_count(); ++b) {
    out.branches.push_back([field, b](std::span<const double> x, std::span<double> v) {
      for (std::size_t c = 0; c < v.size(); ++c) v[c] = field.compiled(b, c)(x);
    });
  }
  return out;
}

std::size_t CallableField::branch_at(std::span<const double> x) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < locus.size(); ++k) {
    double v = x[static_cast<std::size_t>(locus.active()[k] - 1)];
    if (v == 0.0) throw Error(ErrorCode::OnLocus, "coordinate " + std::to_string(locus.active()[k]) + " is zero");
    if (v < 0.0) idx |= std::size_t{1} << k;
  }
  return idx;
}

CallableField CallableField::drop_component(int i1, int sign) const {
  std::size_t pos = locus.position(i1);
  std::vector<int> rest;
  for (int a : locus.active()) {
    if (a != i1) rest.push_back(a);
  }
  CallableField out{NormalCrossingsLocus(locus.dimension(), rest), {}};
  out.branches.resize(branches.size() / 2);
  for (std::size_t idx = 0; idx < branches.size(); ++idx) {
    if (((idx >> pos) & 1u) != (sign < 0 ? 1u : 0u)) continue;
    out.branches[squeeze_bit(idx, pos)] = branches[idx];
  }
  return out;
}

nlohmann::json poly_to_json(const MultiPoly& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back({{"exp", e}, {"coef", rational_to_string(c)}});
  return terms;
}

MultiPoly poly_from_json(const nlohmann::json& j, const std::vector<std::string>& vars) {
  if (j.is_string()) return parse_poly(j.get<std::string>(), vars);
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "polynomial must be a term list or expression string");
  MultiPoly p(vars);
  for (const auto& t : j) {
    auto e = t.at("exp").get<Exponent>();
    const auto& c = t.at("coef");
    Rational q = c.is_string() ? parse_rational(c.get<std::string>()) : parse_rational(c.dump());
    p += MultiPoly::monomial(vars, e, q);
  }
  return p;
}

nlohmann::json PiecewiseField::to_json() const {
  nlohmann::json branches = nlohmann::json::array();
  for (std::size_t b = 0; b < branches_.size(); ++b) {
    nlohmann::json signs = nlohmann::json::array();
    for (std::size_t k = 0; k < locus_.size(); ++k) signs.push_back((b >> k) & 1u ? -1 : 1);
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : branches_[b]) comps.push_back(poly_to_json(c));
    branches.push_back({{"signs", signs}, {"components", comps}});
  }
  return {{"n", locus_.dimension()}, {"variables", vars_}, {"active_axes", locus_.active()}, {"branches", branches}};
}

PiecewiseField PiecewiseField::from_json(const nlohmann::json& j) {
  try {
    int n = j.at("n").get<int>();
    std::vector<std::string> vars;
    if (j.contains("variables")) {
      vars = j.at("variables").get<std::vector<std::string>>();
    } else {
      for (int i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));
    }
    NormalCrossingsLocus locus(n, j.at("active_axes").get<std::vector<int>>());
    std::map<SignVector, VectorPoly> branches;
    for (const auto& b : j.at("branches")) {
      auto signs = b.at("signs").get<std::vector<int>>();
      if (signs.size() != locus.size()) throw Error(ErrorCode::ParseError, "signs length differs from active axes");
      std::map<int, int> sm;
      for (std::size_t k = 0; k < signs.size(); ++k) sm[locus.active()[k]] = signs[k];
      VectorPoly comps;
      for (const auto& c : b.at("components")) comps.push_back(poly_from_json(c, vars));
      if (!branches.emplace(SignVector(sm), comps).second) throw Error(ErrorCode::ParseError, "duplicate branch");
    }
    return from_map(std::move(locus), std::move(vars), branches);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

}  // namespace crossreg
