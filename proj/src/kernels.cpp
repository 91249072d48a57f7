#include "crossreg/kernels.hpp"

#include <exception>
#include <mutex>

#include "crossreg/error.hpp"

namespace crossreg {

void for_each_index(std::size_t count, Exec exec, const std::function<void(std::size_t)>& fn) {
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex guard;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 16)
  for (long long i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> tensor_grid(std::span<const double> lo, std::span<const double> hi, std::span<const int> counts) {
  const std::size_t d = counts.size();
  if (lo.size() != d || hi.size() != d) throw Error(ErrorCode::InvalidArgument, "grid bounds mismatch");
  std::size_t total = 1;
  for (int c : counts) {
    if (c < 1) throw Error(ErrorCode::InvalidArgument, "grid needs at least one point per variable");
    total *= static_cast<std::size_t>(c);
  }
  std::vector<double> pts(total * d);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rest = i;
    for (std::size_t v = d; v-- > 0;) {
      auto c = static_cast<std::size_t>(counts[v]);
      std::size_t k = rest % c;
      rest /= c;
      pts[i * d + v] = c == 1 ? lo[v] : lo[v] + (hi[v] - lo[v]) * static_cast<double>(k) / static_cast<double>(c - 1);
    }
  }
  return pts;
}

std::vector<double> generator_on_grid(const RegularizedField& rf, const ChartMap& chart,
                                      std::span<const double> points, Exec exec) {
  const std::size_t d = chart.dim();
  const std::size_t count = points.size() / d;
  std::vector<double> out(points.size());
  for_each_index(count, exec, [&](std::size_t i) {
    rf.generator_into(chart, points.subspan(i * d, d), std::span<double>(out).subspan(i * d, d));
  });
  return out;
}

std::vector<double> regularized_on_grid(const RegularizedField& rf, std::span<const double> points, bool quadrature,
                                        Exec exec) {
  const auto n = static_cast<std::size_t>(rf.dimension());
  const std::size_t d = n + 1;
  const std::size_t count = points.size() / d;
  std::vector<double> out(count * n);
  CallableField callable = CallableField::from(rf.base());
  for_each_index(count, exec, [&](std::size_t i) {
    auto p = points.subspan(i * d, d);
    auto v = quadrature ? convolve_numeric(callable, rf.mollifier(), p.first(n), p[n]) : rf.evaluate(p.first(n), p[n]);
    std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(i * n));
  });
  return out;
}

}  // namespace crossreg
