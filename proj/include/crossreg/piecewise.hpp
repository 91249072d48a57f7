#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "crossreg/multipoly.hpp"

namespace crossreg {

/// Coordinate normal-crossings locus: the union of {x_i = 0} for i in active.
/// Axes are 1-based and kept sorted.
class NormalCrossingsLocus {
 public:
  NormalCrossingsLocus() = default;
  NormalCrossingsLocus(int n, std::vector<int> active);

  int dimension() const { return n_; }
  const std::vector<int>& active() const { return active_; }
  std::size_t size() const { return active_.size(); }
  bool empty() const { return active_.empty(); }
  bool contains(int axis) const;
  /// Position of an axis inside active(); throws BadAxis when absent.
  std::size_t position(int axis) const;

  friend bool operator==(const NormalCrossingsLocus&, const NormalCrossingsLocus&) = default;

 private:
  int n_ = 0;
  std::vector<int> active_;
};

/// Signs over the active axes. Branch index bit k is set when the sign at the
/// k-th active axis is negative, so index 0 is the all-plus orthant.
class SignVector {
 public:
  SignVector() = default;
  explicit SignVector(std::map<int, int> signs);

  static SignVector from_index(const NormalCrossingsLocus& locus, std::size_t index);
  std::size_t index(const NormalCrossingsLocus& locus) const;

  const std::map<int, int>& signs() const { return signs_; }
  int at(int axis) const;

  friend bool operator<(const SignVector& a, const SignVector& b) { return a.signs_ < b.signs_; }
  friend bool operator==(const SignVector& a, const SignVector& b) { return a.signs_ == b.signs_; }

 private:
  std::map<int, int> signs_;
};

using VectorPoly = std::vector<MultiPoly>;

/// Piecewise-polynomial vector field: one polynomial branch per orthant of the
/// active axes. Each branch extends to all of R^n.
class PiecewiseField {
 public:
  PiecewiseField() = default;
  PiecewiseField(NormalCrossingsLocus locus, std::vector<std::string> vars, std::vector<VectorPoly> branches);
  static PiecewiseField from_map(NormalCrossingsLocus locus, std::vector<std::string> vars,
                                 const std::map<SignVector, VectorPoly>& branches);
  /// Field with no discontinuity.
  static PiecewiseField smooth(std::vector<std::string> vars, VectorPoly components);

  const NormalCrossingsLocus& locus() const { return locus_; }
  int dimension() const { return locus_.dimension(); }
  const std::vector<std::string>& variables() const { return vars_; }
  std::size_t branch_count() const { return branches_.size(); }
  const VectorPoly& branch(std::size_t index) const { return branches_.at(index); }
  const VectorPoly& branch(const SignVector& s) const { return branches_.at(s.index(locus_)); }
  const std::vector<VectorPoly>& branches() const { return branches_; }
  const CompiledPoly& compiled(std::size_t index, std::size_t component) const {
    return compiled_[index][component];
  }

  /// Branch index of the orthant containing x; OnLocus if an active coordinate is 0.
  std::size_t branch_at(std::span<const double> x) const;
  std::vector<double> evaluate_branch(std::size_t index, std::span<const double> x) const;

  nlohmann::json to_json() const;
  static PiecewiseField from_json(const nlohmann::json& j);

 private:
  NormalCrossingsLocus locus_;
  std::vector<std::string> vars_;
  std::vector<VectorPoly> branches_;
  std::vector<std::vector<CompiledPoly>> compiled_;
};

std::vector<double> eval_piecewise(const PiecewiseField& field, std::span<const double> x);

/// Remove axis i1 from the locus, keeping the branches on the given side of it.
PiecewiseField drop_component(const PiecewiseField& field, int i1, int sign);

/// Branch evaluated into out (size n).
using BranchFn = std::function<void(std::span<const double> x, std::span<double> out)>;

/// Piecewise field with arbitrary callable branches; only numeric routes accept it.
struct CallableField {
  NormalCrossingsLocus locus;
  std::vector<BranchFn> branches;

  static CallableField from(const PiecewiseField& field);
  std::size_t branch_at(std::span<const double> x) const;
  CallableField drop_component(int i1, int sign) const;
};

nlohmann::json poly_to_json(const MultiPoly& p);
MultiPoly poly_from_json(const nlohmann::json& j, const std::vector<std::string>& vars);

}  // namespace crossreg
