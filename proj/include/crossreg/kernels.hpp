#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "crossreg/chart.hpp"
#include "crossreg/regularization.hpp"

namespace crossreg {

enum class Exec { Serial, Parallel };

/// Calls fn(i) for i in [0, count). The parallel path distributes indices with
/// OpenMP; the serial path is the reference. The first exception thrown by any
/// index is rethrown after the loop.
void for_each_index(std::size_t count, Exec exec, const std::function<void(std::size_t)>& fn);

/// Tensor grid flattened row-major: counts[v] points spanning [lo[v], hi[v]].
std::vector<double> tensor_grid(std::span<const double> lo, std::span<const double> hi, std::span<const int> counts);

/// Divided generator of rf in the chart at every grid point (dim values per point).
std::vector<double> generator_on_grid(const RegularizedField& rf, const ChartMap& chart,
                                      std::span<const double> points, Exec exec);

/// f^reg at (x, eps) for every point of a flat (n + 1)-stride list, by the
/// moment route or, if quadrature is set, the quadrature route.
std::vector<double> regularized_on_grid(const RegularizedField& rf, std::span<const double> points, bool quadrature,
                                        Exec exec);

}  // namespace crossreg
