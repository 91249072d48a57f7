#include "crossreg/smoothing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "crossreg/error.hpp"

namespace crossreg {

namespace {

double rounded(double v) { return std::round(v * 1e12) / 1e12; }

SmoothCheck named(const char* name) {
  SmoothCheck c;
  c.name = name;
  return c;
}

std::vector<double> chart_grid(const ChartMap& chart, double r, int count) {
  std::vector<double> lo, hi;
  std::vector<int> counts;
  for (std::size_t j = 0; j < chart.dim(); ++j) {
    lo.push_back(chart.nonneg()[j] ? 0.0 : -r);
    hi.push_back(r);
    counts.push_back(count);
  }
  return tensor_grid(lo, hi, counts);
}

// Off-divisor subgrid: nonnegative variables avoid 0.
std::vector<double> quadrature_grid(const ChartMap& chart, double r, int count) {
  std::vector<double> lo, hi;
  std::vector<int> counts;
  for (std::size_t j = 0; j < chart.dim(); ++j) {
    lo.push_back(chart.nonneg()[j] ? r / count : -r);
    hi.push_back(r);
    counts.push_back(count);
  }
  return tensor_grid(lo, hi, counts);
}

}  // namespace

double neville_at_zero(std::span<const double> h, std::span<const double> v) {
  std::vector<double> p(v.begin(), v.end());
  const std::size_t m = p.size();
  for (std::size_t level = 1; level < m; ++level) {
    for (std::size_t i = 0; i + level < m; ++i) {
      p[i] = (h[i + level] * p[i] - h[i] * p[i + 1]) / (h[i + level] - h[i]);
    }
  }
  return p[0];
}

nlohmann::json SmoothCheck::to_json() const {
  nlohmann::json j = {{"name", name}, {"max_residual", rounded(max_residual)}, {"pass", pass}, {"samples", samples}};
  j["estimated_order"] = estimated_order ? nlohmann::json(std::round(*estimated_order * 1e6) / 1e6) : nlohmann::json(nullptr);
  if (name == "fd_order") j["exact_samples"] = exact_samples;
  return j;
}

bool ChartReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const SmoothCheck& c) { return c.pass; });
}

nlohmann::json ChartReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : checks) list.push_back(c.to_json());
  return {{"chart_id", chart_id}, {"pass", pass()}, {"checks", list}};
}

bool SmoothnessReport::pass() const {
  return std::all_of(charts.begin(), charts.end(), [](const ChartReport& c) { return c.pass(); });
}

nlohmann::json SmoothnessReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : charts) list.push_back(c.to_json());
  return {{"pass", pass()}, {"charts", list}};
}

namespace {

ChartReport checks_on_grid(const RegularizedField& rf, const PlanChart& pc, const SmoothOptions& opt);

}  // namespace

ChartReport smoothness_report(const RegularizedField& rf, const PlanChart& pc, const SmoothOptions& opt) {
  try {
    return checks_on_grid(rf, pc, opt);
  } catch (const Error& e) {
    // the chart reaches a point where the regularized field has no value
    if (e.code() != ErrorCode::OnLocus && e.code() != ErrorCode::OnDivisor) throw;
    SmoothCheck c = named("defined_on_grid");
    c.pass = false;
    c.max_residual = std::numeric_limits<double>::infinity();
    return {pc.chart.id(), {c}};
  }
}

namespace {

ChartReport checks_on_grid(const RegularizedField& rf, const PlanChart& pc, const SmoothOptions& opt) {
  const ChartMap& chart = pc.chart;
  const std::size_t d = chart.dim();
  const auto n = static_cast<std::size_t>(rf.dimension());
  ChartReport report{chart.id(), {}};
  const auto grid = chart_grid(chart, opt.radius, opt.grid_points);
  const std::size_t count = grid.size() / d;
  const auto center = generator_on_grid(rf, chart, grid, opt.exec);

  // Continuity: on each divisor face compare the value with one-sided extrapolations.
  {
    SmoothCheck check = named("continuity");
    std::vector<double> hs;
    for (int k = 0; k < 5; ++k) hs.push_back(1e-2 * std::ldexp(1.0, -k));
    std::vector<double> residual(count, 0.0);
    std::vector<std::size_t> used(count, 0);
    for_each_index(count, opt.exec, [&](std::size_t i) {
      std::vector<double> w(grid.begin() + static_cast<std::ptrdiff_t>(i * d), grid.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
      std::vector<double> tmp(d);
      std::vector<std::vector<double>> vals(hs.size(), std::vector<double>(d));
      for (std::size_t j = 0; j < d; ++j) {
        if (chart.divisor()[j] == 0 || w[j] != 0.0) continue;
        for (double side : {1.0, -1.0}) {
          for (std::size_t k = 0; k < hs.size(); ++k) {
            auto wk = w;
            wk[j] = side * hs[k];
            rf.generator_into(chart, wk, vals[k]);
          }
          for (std::size_t c = 0; c < d; ++c) {
            std::vector<double> col(hs.size());
            for (std::size_t k = 0; k < hs.size(); ++k) col[k] = vals[k][c];
            double lim = neville_at_zero(hs, col);
            residual[i] = std::max(residual[i], std::abs(lim - center[i * d + c]));
          }
          ++used[i];
        }
      }
    });
    for (std::size_t i = 0; i < count; ++i) {
      check.max_residual = std::max(check.max_residual, residual[i]);
      check.samples += used[i];
    }
    check.pass = check.max_residual < opt.continuity_tol;
    report.checks.push_back(check);
  }

  // Second differences in every direction, stencils crossing the divisor faces.
  {
    SmoothCheck check = named("fd_order");
    const auto& hs = opt.meshes;
    if (hs.size() != 3) throw Error(ErrorCode::InvalidArgument, "fd order check needs three meshes");
    std::vector<double> worst(count, std::numeric_limits<double>::infinity());
    std::vector<double> change(count, 0.0);
    std::vector<std::size_t> exact(count, 0), total(count, 0);
    for_each_index(count, opt.exec, [&](std::size_t i) {
      using Buf = std::array<double, kMaxComponents>;
      Buf w{}, wp{}, wm{}, plus{}, minus{};
      std::copy_n(grid.begin() + static_cast<std::ptrdiff_t>(i * d), d, w.begin());
      std::array<Buf, 3> D{};
      const std::span<const double> sp(wp.data(), d), sm(wm.data(), d);
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < 3; ++k) {
          wp = w;
          wm = w;
          wp[j] += hs[k];
          wm[j] -= hs[k];
          rf.generator_into(chart, sp, plus);
          rf.generator_into(chart, sm, minus);
          for (std::size_t c = 0; c < d; ++c) D[k][c] = (plus[c] - 2.0 * center[i * d + c] + minus[c]) / (hs[k] * hs[k]);
        }
        bool all_exact = true;
        for (std::size_t c = 0; c < d; ++c) {
          double floor = opt.noise_floor * std::max(1.0, std::abs(center[i * d + c]));
          double e1 = std::abs(D[0][c] - D[1][c]);
          double e2 = std::abs(D[1][c] - D[2][c]);
          change[i] = std::max(change[i], e1);
          if (e2 <= floor) continue;
          all_exact = false;
          worst[i] = std::min(worst[i], std::log2(e1 / e2));
        }
        ++total[i];
        if (all_exact) ++exact[i];
      }
    });
    double order = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < count; ++i) {
      order = std::min(order, worst[i]);
      check.max_residual = std::max(check.max_residual, change[i]);
      check.samples += total[i];
      check.exact_samples += exact[i];
    }
    if (std::isfinite(order)) check.estimated_order = order;
    check.pass = !check.estimated_order || *check.estimated_order >= opt.min_order;
    report.checks.push_back(check);
  }

  // Moment route of the full field against that of the truncated field.
  {
    SmoothCheck check = named("branch_truncation");
    PiecewiseField reduced = rf.base();
    for (const auto& [axis, sign] : pc.dropped) reduced = drop_component(reduced, axis, sign);
    RegularizedField rg(reduced, rf.mollifier());
    const auto sub = quadrature_grid(chart, opt.radius, opt.truncation_points);
    const std::size_t m = sub.size() / d;
    std::vector<double> tr(m, 0.0);
    for_each_index(m, opt.exec, [&](std::size_t i) {
      auto w = std::span<const double>(sub).subspan(i * d, d);
      auto p = chart.map(w);
      std::span<const double> x(p.data(), n);
      auto a = rf.evaluate_in_chart(chart, w);
      auto b = rg.evaluate(x, p[n]);
      for (std::size_t c = 0; c < n; ++c) tr[i] = std::max(tr[i], std::abs(a[c] - b[c]));
    });
    for (double r : tr) check.max_residual = std::max(check.max_residual, r);
    check.samples = m;
    check.pass = check.max_residual < opt.truncation_tol;
    report.checks.push_back(check);
  }

  // Independent tensor quadrature at a few spread-out subgrid points.
  if (opt.quadrature_samples > 0) {
    SmoothCheck check = named("route_agreement");
    CallableField callable = CallableField::from(rf.base());
    QuadOptions qopt;
    qopt.abs_tol = 1e-11;
    const auto sub = quadrature_grid(chart, opt.radius, opt.truncation_points);
    const std::size_t total = sub.size() / d;
    const std::size_t m = std::min<std::size_t>(total, static_cast<std::size_t>(opt.quadrature_samples));
    std::vector<double> ag(m, 0.0);
    for_each_index(m, opt.exec, [&](std::size_t k) {
      // golden-ratio stride spreads the picks over the subgrid
      const std::size_t i = static_cast<std::size_t>(std::fmod(0.5 + 0.6180339887498949 * static_cast<double>(k), 1.0) * static_cast<double>(total));
      auto w = std::span<const double>(sub).subspan(i * d, d);
      auto p = chart.map(w);
      std::span<const double> x(p.data(), n);
      auto q = convolve_numeric(callable, rf.mollifier(), x, p[n], qopt);
      auto a = rf.evaluate_in_chart(chart, w);
      for (std::size_t c = 0; c < n; ++c) ag[k] = std::max(ag[k], std::abs(q[c] - a[c]));
    });
    for (double r : ag) check.max_residual = std::max(check.max_residual, r);
    check.samples = m;
    check.pass = check.max_residual < opt.truncation_tol;
    report.checks.push_back(check);
  }

  // The eps monomial is a first integral of the divided generator.
  {
    SmoothCheck check = named("fiber_tangency");
    const auto& erow = chart.exponents()[n];
    for (std::size_t i = 0; i < count; ++i) {
      auto w = std::span<const double>(grid).subspan(i * d, d);
      double s = 0.0, scale = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        if (erow[j] == 0) continue;
        std::vector<int> e(erow.begin(), erow.end());
        e[j] -= 1;
        double t = erow[j] * monomial_value(e, w) * center[i * d + j];
        s += t;
        scale = std::max(scale, std::abs(t));
      }
      check.max_residual = std::max(check.max_residual, std::abs(s) / std::max(1.0, scale));
    }
    check.samples = count;
    check.pass = check.max_residual < 1e-12;
    report.checks.push_back(check);
  }
  return report;
}

}  // namespace

SmoothnessReport smoothness_report(const RegularizedField& rf, const SmoothingPlan& plan, const SmoothOptions& opt) {
  SmoothnessReport report;
  for (const auto& pc : plan.atlas) report.charts.push_back(smoothness_report(rf, pc, opt));
  return report;
}

ChartReport verify_smooth(const RegularizedField& rf, const PlanChart& chart, const SmoothOptions& opt) {
  auto report = smoothness_report(rf, chart, opt);
  if (!report.pass()) throw Error(ErrorCode::NotSmooth, report.to_json().dump());
  return report;
}

nlohmann::json OverlapReport::to_json() const {
  return {{"pairs", pairs},
          {"min_factor", rounded(min_factor)},
          {"max_parallel_residual", rounded(max_parallel_residual)},
          {"max_ratio_residual", rounded(max_ratio_residual)},
          {"pass", pass}};
}

OverlapReport chart_overlap(const RegularizedField& rf, const SmoothingPlan& plan, std::size_t samples, unsigned seed,
                            double radius) {
  const auto n = static_cast<std::size_t>(rf.dimension());
  const std::size_t d = n + 1;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  std::uniform_real_distribution<double> ue(0.02, 0.3);
  OverlapReport out;
  out.min_factor = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<double> p(d);
    for (std::size_t k = 0; k < n; ++k) p[k] = u(rng);
    p[n] = ue(rng);
    // Charts whose image contains p inside the verified region.
    std::vector<std::pair<std::size_t, std::vector<double>>> hits;
    for (std::size_t c = 0; c < plan.atlas.size(); ++c) {
      const auto& chart = plan.atlas[c].chart;
      auto w = chart.inverse_map(p);
      bool inside = true;
      for (std::size_t j = 0; j < d; ++j) {
        if ((chart.nonneg()[j] && w[j] <= 0.0) || std::abs(w[j]) > radius) inside = false;
      }
      if (inside) hits.emplace_back(c, std::move(w));
    }
    for (std::size_t a = 0; a < hits.size(); ++a) {
      for (std::size_t b = a + 1; b < hits.size(); ++b) {
        const auto& ca = plan.atlas[hits[a].first].chart;
        const auto& cb = plan.atlas[hits[b].first].chart;
        auto va = ca.pushforward(hits[a].second, rf.generator(ca, hits[a].second));
        auto vb = cb.pushforward(hits[b].second, rf.generator(cb, hits[b].second));
        double ab = 0.0, bb = 0.0, aa = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          ab += va[k] * vb[k];
          bb += vb[k] * vb[k];
          aa += va[k] * va[k];
        }
        if (bb == 0.0 || aa == 0.0) continue;
        double r = ab / bb;
        double res = 0.0;
        for (std::size_t k = 0; k < d; ++k) res += (va[k] - r * vb[k]) * (va[k] - r * vb[k]);
        double quotient = ca.divisor_value(hits[a].second) / cb.divisor_value(hits[b].second);
        out.min_factor = std::min(out.min_factor, r);
        out.max_parallel_residual = std::max(out.max_parallel_residual, std::sqrt(res / aa));
        out.max_ratio_residual = std::max(out.max_ratio_residual, std::abs(r - quotient) / quotient);
        ++out.pairs;
      }
    }
  }
  out.pass = out.pairs > 0 && out.min_factor > 0.0 && out.max_parallel_residual < 1e-10 && out.max_ratio_residual < 1e-10;
  return out;
}

}  // namespace crossreg
